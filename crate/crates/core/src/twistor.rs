//! Twistor projection CP³ → HP¹, the real structure j, two-spheres as
//! quaternionic endomorphisms, and touching/half-touching classification.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::proj4::{
    self, columns, line_factorize, line_meet, lines_incident, pair_complement, quadric_pair, wedge,
    Bivector, CVector4, ProjPlane,
};
use crate::quat::Quaternion;
use crate::{default_tol, GeomError, Result};

/// A point [a : b] of HP¹ under right scaling (a, b) ~ (aq, bq).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub a: Quaternion,
    pub b: Quaternion,
}

impl HPoint {
    /// Canonical representative: unit norm, first non-negligible coordinate real positive.
    pub fn new(a: Quaternion, b: Quaternion) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        let lead = if a.norm() > 1e-10 * n { a } else { b };
        let r = lead.conj().scale(1.0 / (lead.norm() * n));
        Ok(HPoint { a: a * r, b: b * r })
    }

    /// Stores the coordinates as given; used by deserialization.
    pub fn from_raw(a: Quaternion, b: Quaternion) -> Self {
        HPoint { a, b }
    }

    pub fn infinity() -> Self {
        HPoint {
            a: Quaternion::ONE,
            b: Quaternion::ZERO,
        }
    }

    /// The affine point [q : 1].
    pub fn from_affine(q: Quaternion) -> Self {
        HPoint::new(q, Quaternion::ONE).expect("nonzero")
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::from_affine(Quaternion::from_complex(z))
    }

    /// a·b⁻¹, or `None` near ∞.
    pub fn affine(&self) -> Option<Quaternion> {
        let n = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        if self.b.norm() <= 1e-12 * n {
            None
        } else {
            Some(self.a * self.b.inv())
        }
    }

    /// A lift to ℂ⁴.
    pub fn lift(&self) -> CVector4 {
        CVector4::from_quats(self.a, self.b)
    }

    /// Chordal distance of unit representatives after optimal right alignment.
    pub fn dist(&self, o: &HPoint) -> f64 {
        let nx = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        let ny = (o.a.norm_sqr() + o.b.norm_sqr()).sqrt();
        let (xa, xb) = (self.a.scale(1.0 / nx), self.b.scale(1.0 / nx));
        let (ya, yb) = (o.a.scale(1.0 / ny), o.b.scale(1.0 / ny));
        let s = xa.conj() * ya + xb.conj() * yb;
        let r = if s.norm() > 0.0 {
            s.conj().scale(1.0 / s.norm())
        } else {
            Quaternion::ONE
        };
        ((xa - ya * r).norm_sqr() + (xb - yb * r).norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// [v]_ℂ ↦ [v]_ℍ.
pub fn twistor_project(v: &CVector4) -> Result<HPoint> {
    let (a, b) = v.to_quats();
    HPoint::new(a, b)
}

/// The twistor fiber [v ∧ vj] over p.
pub fn twistor_fiber(p: &HPoint) -> Bivector {
    let v = p.lift();
    wedge(&v, &v.j())
        .normalized()
        .expect("fiber of a nonzero point")
}

pub fn j_on_bivector(a: &Bivector) -> Bivector {
    a.j()
}

/// Distance of a unit α from the complex line through j(α): |jα − ⟨α, jα⟩α|.
pub fn j_real_defect(a: &Bivector) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        return 0.0;
    }
    let u = a.scale(Complex64::new(1.0 / n, 0.0));
    let ju = u.j();
    let c = u.hdot(&ju);
    (ju - u * c).norm()
}

/// True iff α is proportional to j(α); the phase of a representative can then be made to fix it.
pub fn is_j_real(a: &Bivector, tol: f64) -> bool {
    j_real_defect(a) < tol
}

/// The point of HP¹ of a j-real line (a twistor fiber).
pub fn fiber_point(a: &Bivector) -> Result<HPoint> {
    let (v, _) = line_factorize(a)?;
    twistor_project(&v)
}

/// A 2×2 quaternionic matrix acting on column vectors of ℍ² from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereEndo {
    pub m: [[Quaternion; 2]; 2],
}

impl SphereEndo {
    pub fn new(m: [[Quaternion; 2]; 2]) -> Self {
        SphereEndo { m }
    }

    /// The translated sphere [[R, 2h], [0, N]] with h = ½(qN − Rq) for its points q.
    pub fn from_params(r: Quaternion, n: Quaternion, h: Quaternion) -> Self {
        SphereEndo {
            m: [[r, h.scale(2.0)], [Quaternion::ZERO, n]],
        }
    }

    /// The sphere through q0 with tangent data (R, N): diag(R, N) translated by q0.
    pub fn translated(r: Quaternion, n: Quaternion, q0: Quaternion) -> Self {
        Self::from_params(r, n, (q0 * n - r * q0).scale(0.5))
    }

    /// (R, N, h) when the lower-left entry vanishes (sphere through ∞).
    pub fn affine_params(&self, tol: f64) -> Option<(Quaternion, Quaternion, Quaternion)> {
        if self.m[1][0].norm() > tol {
            return None;
        }
        Some((self.m[0][0], self.m[1][1], self.m[0][1].scale(0.5)))
    }

    pub fn apply(&self, x: (Quaternion, Quaternion)) -> (Quaternion, Quaternion) {
        (
            self.m[0][0] * x.0 + self.m[0][1] * x.1,
            self.m[1][0] * x.0 + self.m[1][1] * x.1,
        )
    }

    pub fn compose(&self, o: &SphereEndo) -> SphereEndo {
        let mut m = [[Quaternion::ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = self.m[r][0] * o.m[0][c] + self.m[r][1] * o.m[1][c];
            }
        }
        SphereEndo { m }
    }

    /// max |(S² + I)_rc|.
    pub fn square_residual(&self) -> f64 {
        let s2 = self.compose(self);
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c {
                    Quaternion::ONE
                } else {
                    Quaternion::ZERO
                };
                worst = worst.max((s2.m[r][c] + id).norm());
            }
        }
        worst
    }

    /// The ℂ-linear map on ℂ⁴ induced by S.
    pub fn complex_matrix(&self) -> CMat {
        let mut m = CMat::zeros(4, 4);
        for k in 0..4 {
            let (q1, q2) = CVector4::basis(k).to_quats();
            let (y1, y2) = self.apply((q1, q2));
            let y = CVector4::from_quats(y1, y2);
            for r in 0..4 {
                m[(r, k)] = y.c[r];
            }
        }
        m
    }

    /// Twistor lift: the i-eigenline of S.
    pub fn to_line(&self) -> Result<Bivector> {
        let m = self.complex_matrix() - CMat::identity(4, 4) * Complex64::new(0.0, 1.0);
        let ns = linalg::null_space(&m, 1e-8);
        if ns.len() != 2 {
            return Err(GeomError::Degenerate(
                "endomorphism has no 2-dim i-eigenspace".into(),
            ));
        }
        wedge(
            &CVector4::from_slice(ns[0].as_slice()),
            &CVector4::from_slice(ns[1].as_slice()),
        )
        .normalized()
    }

    /// Residual of S·x = x·μ with μ the best quaternion, relative to |x|.
    pub fn eigen_residual(&self, p: &HPoint) -> f64 {
        let x = (p.a, p.b);
        let y = self.apply(x);
        let nx = x.0.norm_sqr() + x.1.norm_sqr();
        let mu = (x.0.conj() * y.0 + x.1.conj() * y.1).scale(1.0 / nx);
        let r = ((y.0 - x.0 * mu).norm_sqr() + (y.1 - x.1 * mu).norm_sqr()).sqrt();
        r / nx.sqrt()
    }

    /// |qN − Rq − 2h| for an affine point q, when the sphere passes through ∞.
    pub fn affine_residual(&self, q: Quaternion) -> Option<f64> {
        let (r, n, h) = self.affine_params(1e-12)?;
        Some((q * n - r * q - h.scale(2.0)).norm())
    }
}

/// Either a round two-sphere or, for j-real lines, a point of HP¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereOrPoint {
    Sphere(SphereEndo),
    Point(HPoint),
}

/// The sphere whose i-eigenline is α, or the point when α is a twistor fiber.
pub fn sphere_from_line(a: &Bivector) -> Result<SphereOrPoint> {
    if !proj4::is_decomposable(a, 1e-8) {
        return Err(GeomError::NotDecomposable);
    }
    if is_j_real(a, 1e-8) {
        return Ok(SphereOrPoint::Point(fiber_point(a)?));
    }
    let (v, w) = line_factorize(a)?;
    let b = columns(&[v, w, v.j(), w.j()]);
    let binv = b
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::Degenerate("line meets its j-image".into()))?;
    let i = Complex64::new(0.0, 1.0);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![i, i, -i, -i]));
    let m = &b * d * binv;
    let col = |k: usize| {
        let y = CVector4::new([m[(0, k)], m[(1, k)], m[(2, k)], m[(3, k)]]);
        y.to_quats()
    };
    let (s00, s10) = col(0);
    let (s01, s11) = col(2);
    Ok(SphereOrPoint::Sphere(SphereEndo::new([
        [s00, s01],
        [s10, s11],
    ])))
}

/// Membership S·p = p·μ with μ² = −1.
pub fn sphere_contains(s: &SphereEndo, p: &HPoint, tol: f64) -> bool {
    s.eigen_residual(p) < tol
}

/// Membership of p in the sphere of a line α: its fiber meets α.
pub fn line_contains(a: &Bivector, p: &HPoint, tol: f64) -> bool {
    lines_incident(a, &twistor_fiber(p), tol)
}

/// Outcome of comparing two two-spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactKind {
    Disjoint,
    Touch,
    HalfTouch,
    Identical,
    CircleIntersection,
    /// The spheres cross in exactly two points without sharing a null line.
    Transverse,
}

/// Classification of a sphere pair with witness points lying on both.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactClass {
    pub kind: ContactKind,
    pub witnesses: Vec<HPoint>,
    /// Set when the relation holds between α and βj rather than α and β.
    pub opposite_orientation: bool,
}

/// j-real orthonormal basis of the real form of a j-invariant subspace.
pub fn real_form_basis(span: &[Bivector]) -> Vec<Bivector> {
    let i = Complex64::new(0.0, 1.0);
    let mut cands = Vec::new();
    for u in span {
        cands.push(*u + u.j());
        let iu = u.scale(i);
        cands.push(iu + iu.j());
    }
    // Real Gram-Schmidt with re-orthogonalization; real combinations stay j-real.
    let smax = cands.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out: Vec<Bivector> = Vec::new();
    for cand in cands {
        let mut v = cand;
        for _ in 0..2 {
            for b in &out {
                let proj = b.hdot(&v).re;
                v = v - *b * Complex64::new(proj, 0.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 * smax {
            out.push(v * Complex64::new(1.0 / n, 0.0));
        }
    }
    out
}

/// Real Gram matrix of the quadric pairing on j-real vectors.
pub fn real_gram(basis: &[Bivector]) -> DMatrix<f64> {
    DMatrix::from_fn(basis.len(), basis.len(), |r, c| {
        quadric_pair(&basis[r], &basis[c]).re
    })
}

/// Real null vectors of the pairing on the real span of `basis` (up to two, from extreme eigenpairs).
fn real_null_points(basis: &[Bivector], tol: f64) -> (Vec<Bivector>, usize, usize) {
    let g = real_gram(basis);
    let eig = g.symmetric_eigen();
    let n = basis.len();
    let (mut imax, mut imin) = (0, 0);
    for k in 0..n {
        if eig.eigenvalues[k] > eig.eigenvalues[imax] {
            imax = k;
        }
        if eig.eigenvalues[k] < eig.eigenvalues[imin] {
            imin = k;
        }
    }
    let pos = eig.eigenvalues.iter().filter(|&&x| x > tol).count();
    let neg = eig.eigenvalues.iter().filter(|&&x| x < -tol).count();
    let combo = |coef: &[f64]| {
        let mut b = Bivector::zero();
        for k in 0..n {
            b = b + basis[k] * Complex64::new(coef[k], 0.0);
        }
        b
    };
    let mut pts = Vec::new();
    if pos > 0 && neg > 0 {
        let lp = eig.eigenvalues[imax];
        let ln = -eig.eigenvalues[imin];
        for s in [1.0, -1.0] {
            let coef: Vec<f64> = (0..n)
                .map(|k| {
                    eig.eigenvectors[(k, imax)] / lp.sqrt()
                        + s * eig.eigenvectors[(k, imin)] / ln.sqrt()
                })
                .collect();
            pts.push(combo(&coef));
        }
    } else if pos + neg < n {
        let k0 = (0..n)
            .min_by(|&a, &b| {
                eig.eigenvalues[a]
                    .abs()
                    .partial_cmp(&eig.eigenvalues[b].abs())
                    .unwrap()
            })
            .unwrap();
        let coef: Vec<f64> = (0..n).map(|k| eig.eigenvectors[(k, k0)]).collect();
        pts.push(combo(&coef));
    }
    (pts, pos, neg)
}

fn classify_incident(a: &Bivector, b: &Bivector, tol: f64) -> Result<(ContactKind, Vec<HPoint>)> {
    let p = line_meet(a, b)?;
    let (v1, w1) = line_factorize(a)?;
    let (v2, w2) = line_factorize(b)?;
    let plane = ProjPlane::span(&[v1, w1, v2, w2], 1e-8)?;
    let tp = twistor_project(&p)?;
    if plane.contains(&p.j(), tol.max(1e-9)) {
        Ok((ContactKind::Touch, vec![tp]))
    } else {
        let fib = proj4::meet_two_planes(&plane, &plane.j())?;
        Ok((ContactKind::HalfTouch, vec![tp, fiber_point(&fib)?]))
    }
}

/// Classifies the point sets of two spheres given by non-real lines of CP³.
pub fn classify_contact(a: &Bivector, b: &Bivector) -> Result<ContactClass> {
    classify_contact_tol(a, b, default_tol())
}

pub fn classify_contact_tol(a: &Bivector, b: &Bivector, tol: f64) -> Result<ContactClass> {
    let a = a.normalized()?;
    let b = b.normalized()?;
    for x in [&a, &b] {
        if !proj4::is_decomposable(x, 1e-8) {
            return Err(GeomError::NotDecomposable);
        }
        if is_j_real(x, 1e-8) {
            return Err(GeomError::NotASphere);
        }
    }
    if a.dist(&b) < 1e-9 {
        return Err(GeomError::Degenerate("equal lines".into()));
    }
    let bj = b.j();
    if a.dist(&bj) < 1e-9 {
        return Ok(ContactClass {
            kind: ContactKind::Identical,
            witnesses: vec![],
            opposite_orientation: true,
        });
    }
    if lines_incident(&a, &b, tol) {
        let (kind, witnesses) = classify_incident(&a, &b, tol)?;
        return Ok(ContactClass {
            kind,
            witnesses,
            opposite_orientation: false,
        });
    }
    if lines_incident(&a, &bj, tol) {
        let (kind, witnesses) = classify_incident(&a, &bj, tol)?;
        return Ok(ContactClass {
            kind,
            witnesses,
            opposite_orientation: true,
        });
    }
    let comp = pair_complement(&[a, a.j(), b, bj], 1e-9);
    let basis = real_form_basis(&comp);
    let (pts, pos, neg) = real_null_points(&basis, 1e-10);
    let witnesses = pts.iter().map(fiber_point).collect::<Result<Vec<_>>>()?;
    let indefinite = pos > 0 && neg > 0;
    let kind = match basis.len() {
        2 if indefinite => ContactKind::Transverse,
        3 if indefinite => ContactKind::CircleIntersection,
        2 | 3 if witnesses.is_empty() => ContactKind::Disjoint,
        // semidefinite with a null direction: a single common point
        2 | 3 => ContactKind::Touch,
        k => {
            return Err(GeomError::Degenerate(format!(
                "real complement of dimension {k}"
            )))
        }
    };
    Ok(ContactClass {
        kind,
        witnesses,
        opposite_orientation: false,
    })
}

/// True iff the pencil of lines through the common point of α, β inside their plane holds a fiber.
pub fn null_line_has_real_point(a: &Bivector, b: &Bivector, tol: f64) -> Result<bool> {
    let p = line_meet(a, b)?;
    let (v1, w1) = line_factorize(a)?;
    let (v2, w2) = line_factorize(b)?;
    let plane = ProjPlane::span(&[v1, w1, v2, w2], 1e-8)?;
    Ok(plane.contains(&p.j(), tol))
}

/// The four lifts [v, vj, w, wj] of a line as a matrix; rank 4 iff the line is skew to its j-image.
pub fn j_frame_rank(a: &Bivector) -> Result<usize> {
    let (v, w) = line_factorize(a)?;
    Ok(linalg::rank(&columns(&[v, v.j(), w, w.j()]), 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::conjugator_to;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(k: usize) -> CVector4 {
        CVector4::basis(k)
    }

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn projection_examples() {
        assert!(twistor_project(&e(0)).unwrap().dist(&HPoint::infinity()) < 1e-15);
        assert!(twistor_project(&e(1)).unwrap().dist(&HPoint::infinity()) < 1e-15);
        let p = twistor_project(&(e(0) + e(2))).unwrap();
        assert!(p.dist(&HPoint::from_affine(Quaternion::ONE)) < 1e-15);
        assert_eq!(
            twistor_project(&CVector4::zero()),
            Err(GeomError::ZeroVector)
        );
    }

    #[test]
    fn fiber_examples() {
        assert!(twistor_fiber(&HPoint::infinity()).dist(&wedge(&e(0), &e(1))) < 1e-15);
        let zero = HPoint::from_affine(Quaternion::ZERO);
        assert!(twistor_fiber(&zero).dist(&wedge(&e(2), &e(3))) < 1e-15);
        let p = HPoint::from_affine(q(0.3, -1.0, 0.4, 2.0));
        let f = twistor_fiber(&p);
        assert!(is_j_real(&f, 1e-12));
        let (v, w) = line_factorize(&f).unwrap();
        assert!(twistor_project(&v).unwrap().dist(&p) < 1e-12);
        assert!(twistor_project(&w).unwrap().dist(&p) < 1e-12);
    }

    #[test]
    fn j_examples() {
        let f01 = wedge(&e(0), &e(1));
        assert!(f01.j().dist(&f01) < 1e-15 && is_j_real(&f01, 1e-12));
        let f02 = wedge(&e(0), &e(2));
        assert!(f02.j().dist(&wedge(&e(1), &e(3))) < 1e-15);
        assert!(!is_j_real(&f02, 1e-9));
        let s = f02 + wedge(&e(1), &e(3));
        assert!((s.j() - s).norm() < 1e-15 && is_j_real(&s, 1e-12));
    }

    #[test]
    fn sphere_from_line_examples() {
        let s = match sphere_from_line(&wedge(&e(0), &e(2))).unwrap() {
            SphereOrPoint::Sphere(s) => s,
            _ => panic!("expected sphere"),
        };
        let want = SphereEndo::new([
            [Quaternion::I, Quaternion::ZERO],
            [Quaternion::ZERO, Quaternion::I],
        ]);
        for r in 0..2 {
            for cc in 0..2 {
                assert!((s.m[r][cc] - want.m[r][cc]).norm() < 1e-12);
            }
        }
        match sphere_from_line(&wedge(&e(0), &e(1))).unwrap() {
            SphereOrPoint::Point(p) => assert!(p.dist(&HPoint::infinity()) < 1e-12),
            _ => panic!("expected point"),
        }
        let bad = wedge(&e(0), &e(1)) + wedge(&e(2), &e(3));
        assert_eq!(sphere_from_line(&bad), Err(GeomError::NotDecomposable));
    }

    #[test]
    fn translated_sphere_round_trip() {
        let r = q(0.0, 0.3, -0.5, 0.8).normalized();
        let n = q(0.0, -0.7, 0.1, 0.2).normalized();
        let q0 = q(0.4, 1.0, -0.3, 0.2);
        let s = SphereEndo::translated(r, n, q0);
        assert!(s.square_residual() < 1e-12);
        let (_, _, h) = s.affine_params(1e-12).unwrap();
        assert!((h - (q0 * n - r * q0).scale(0.5)).norm() < 1e-12);
        assert!(s.affine_residual(q0).unwrap() < 1e-12);
        assert!(sphere_contains(&s, &HPoint::from_affine(q0), 1e-9));
        assert!(sphere_contains(&s, &HPoint::infinity(), 1e-9));
        // the line of S gives back S
        let l = s.to_line().unwrap();
        match sphere_from_line(&l).unwrap() {
            SphereOrPoint::Sphere(t) => {
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((t.m[a][b] - s.m[a][b]).norm() < 1e-9);
                    }
                }
            }
            _ => panic!("expected sphere"),
        }
        // points of the sphere: q0 + λ(ℂ)μ, with λ i λ⁻¹ = R, μ i μ⁻¹ = N
        let lr = conjugator_to(r).unwrap();
        let ln = conjugator_to(n).unwrap();
        for z in [c(1.0, 0.0), c(-0.3, 2.0), c(0.0, -1.5)] {
            let p = q0 + lr * Quaternion::from_complex(z) * ln.inv();
            assert!(s.affine_residual(p).unwrap() < 1e-12);
            assert!(sphere_contains(&s, &HPoint::from_affine(p), 1e-9));
            assert!(line_contains(&l, &HPoint::from_affine(p), 1e-9));
        }
    }

    #[test]
    fn containment_examples() {
        let s = SphereEndo::new([
            [Quaternion::I, Quaternion::ZERO],
            [Quaternion::ZERO, Quaternion::I],
        ]);
        assert!(sphere_contains(
            &s,
            &HPoint::from_complex(c(0.7, -2.0)),
            1e-9
        ));
        assert!(!sphere_contains(
            &s,
            &HPoint::from_affine(Quaternion::J),
            1e-9
        ));
        assert!(sphere_contains(&s, &HPoint::infinity(), 1e-9));
    }

    #[test]
    fn classify_examples() {
        let a = wedge(&e(0), &e(2));
        let t = classify_contact(&a, &wedge(&e(0), &(e(2) + e(1)))).unwrap();
        assert_eq!(t.kind, ContactKind::Touch);
        assert!(t.witnesses[0].dist(&HPoint::infinity()) < 1e-12);

        let h = classify_contact(&a, &wedge(&e(0), &e(3))).unwrap();
        assert_eq!(h.kind, ContactKind::HalfTouch);
        assert!(h.witnesses[0].dist(&HPoint::infinity()) < 1e-12);
        assert!(h.witnesses[1].dist(&HPoint::from_affine(Quaternion::ZERO)) < 1e-12);

        let i = classify_contact(&a, &wedge(&e(1), &e(3))).unwrap();
        assert_eq!(i.kind, ContactKind::Identical);
        assert!(classify_contact(&a, &a).is_err());
        assert_eq!(
            classify_contact(&a, &wedge(&e(0), &e(1))),
            Err(GeomError::NotASphere)
        );
    }

    #[test]
    fn classify_non_incident_cases() {
        let i = Quaternion::I;
        let unit = SphereEndo::translated(i, i, Quaternion::ZERO)
            .to_line()
            .unwrap();
        // parallel planes meet only at ∞
        let shifted = SphereEndo::translated(i, i, Quaternion::J)
            .to_line()
            .unwrap();
        let par = classify_contact(&unit, &shifted).unwrap();
        assert_eq!(par.kind, ContactKind::Touch);
        assert!(par.witnesses[0].dist(&HPoint::infinity()) < 1e-8);
        // invert ℂ + 2j to a bounded sphere, then move it away from ℂ
        let o = Quaternion::ZERO;
        let one = Quaternion::ONE;
        let inv = SphereEndo::new([[o, one], [one, o]]);
        let t = SphereEndo::new([[one, Quaternion::J * 3.0], [o, one]]);
        let tinv = SphereEndo::new([[one, Quaternion::J * -3.0], [o, one]]);
        let plane = SphereEndo::translated(i, i, Quaternion::J * 2.0);
        let ball = t.compose(&inv).compose(&plane).compose(&inv).compose(&tinv);
        assert!(ball.square_residual() < 1e-12);
        let far = ball.to_line().unwrap();
        let d = classify_contact(&unit, &far).unwrap();
        assert_eq!(d.kind, ContactKind::Disjoint);
        assert!(d.witnesses.is_empty());
        // the plane spanned by 1 and j meets ℂ in the real line: a circle through ∞
        let k = Quaternion::K;
        let real_plane = SphereEndo::translated(k, -k, Quaternion::ZERO)
            .to_line()
            .unwrap();
        let cl = classify_contact(&unit, &real_plane).unwrap();
        assert_eq!(cl.kind, ContactKind::CircleIntersection);
        for w in &cl.witnesses {
            assert!(line_contains(&unit, w, 1e-8) && line_contains(&real_plane, w, 1e-8));
            assert!(w
                .affine()
                .map(|x| x.w.abs() + x.y.abs() + x.z.abs() < 1e-8)
                .unwrap_or(true));
        }
    }

    fn unit_imag() -> impl Strategy<Value = Quaternion> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
            .prop_map(|(x, y, z)| Quaternion::new(0.0, x, y, z).normalized())
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(w, x, y, z)| q(w, x, y, z))
    }

    fn cvec() -> impl Strategy<Value = CVector4> {
        proptest::collection::vec(-1.0..1.0f64, 8).prop_map(|v| {
            CVector4::new([c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])])
        })
    }

    proptest! {
        #[test]
        fn fibration(v in cvec(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
            prop_assume!(v.norm() > 1e-2 && re.abs() + im.abs() > 1e-2);
            let p = twistor_project(&v).unwrap();
            prop_assert!(twistor_project(&v.scale(c(re, im))).unwrap().dist(&p) < 1e-9);
            prop_assert!(twistor_project(&v.j()).unwrap().dist(&p) < 1e-9);
        }

        #[test]
        fn fibers_disjoint(a in quat(), b in quat()) {
            prop_assume!((a - b).norm() > 1e-2);
            let fa = twistor_fiber(&HPoint::from_affine(a));
            let fb = twistor_fiber(&HPoint::from_affine(b));
            prop_assert!(!lines_incident(&fa, &fb, 1e-9));
        }

        #[test]
        fn every_plane_holds_one_fiber(p0 in cvec(), p1 in cvec(), p2 in cvec()) {
            let pl = match proj4::plane_from([p0, p1, p2]) { Ok(p) => p, Err(_) => return Ok(()) };
            let l = proj4::meet_two_planes(&pl, &pl.j()).unwrap();
            prop_assert!(is_j_real(&l, 1e-8));
            prop_assert!(pl.contains_line(&l, 1e-8).unwrap());
        }

        #[test]
        fn lifted_spheres_square_to_minus_one(r in unit_imag(), n in unit_imag(), q0 in quat()) {
            let l = SphereEndo::translated(r, n, q0).to_line().unwrap();
            if let SphereOrPoint::Sphere(s) = sphere_from_line(&l).unwrap() {
                prop_assert!(s.square_residual() < 1e-9);
            } else {
                prop_assert!(false, "sphere expected");
            }
        }

        #[test]
        fn classification_symmetric(r1 in unit_imag(), n1 in unit_imag(), q1 in quat(),
                                    r2 in unit_imag(), n2 in unit_imag(), q2 in quat()) {
            let a = SphereEndo::translated(r1, n1, q1).to_line().unwrap();
            let b = SphereEndo::translated(r2, n2, q2).to_line().unwrap();
            let ab = classify_contact(&a, &b).unwrap();
            let ba = classify_contact(&b, &a).unwrap();
            prop_assert_eq!(ab.kind, ba.kind);
            for w in &ab.witnesses {
                prop_assert!(line_contains(&a, w, 1e-7) && line_contains(&b, w, 1e-7));
            }
        }
    }
}
