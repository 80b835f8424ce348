//! Projective linear algebra on ℂ⁴ and ∧²ℂ⁴.
//!
//! Vectors use the ordered basis {e₁, e₁j, e₂, e₂j}; a quaternionic pair
//! (q₁, q₂) ∈ ℍ² with qₘ = z₁ + j·z₂ has components (z₁(q₁), z₂(q₁), z₁(q₂), z₂(q₂)).
//! Bivectors use the Plücker order p01, p02, p03, p12, p13, p23 where
//! p_ab = v_a·w_b − v_b·w_a, and the volume e₁∧e₁j∧e₂∧e₂j is +1.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::linalg::{self, CMat, CVec};
use crate::quat::Quaternion;
use crate::{default_tol, GeomError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Component pairs (a, b) of the Plücker coordinates, in storage order.
pub const PLUCKER_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of p_ab in the storage order, with the sign of the permutation.
fn plucker_index(a: usize, b: usize) -> Option<(usize, f64)> {
    let (lo, hi, s) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    PLUCKER_PAIRS
        .iter()
        .position(|&p| p == (lo, hi))
        .map(|k| (k, s))
}

fn phase_normalize(c: &mut [Complex64]) -> bool {
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    for z in c.iter_mut() {
        *z /= n;
    }
    if let Some(lead) = c.iter().copied().find(|z| z.norm() > 1e-10) {
        let ph = lead.conj() / lead.norm();
        for z in c.iter_mut() {
            *z *= ph;
        }
    }
    true
}

/// Angle-style distance between projective points given by unit-normalizable vectors.
///
/// Aligns the phase of `b` to `a` and returns the chordal distance of the unit
/// representatives, which is accurate down to rounding for nearby points.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let ph = if ip.norm() > 0.0 {
        ip.conj() / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na - y * ph / nb).norm_sqr())
        .sum::<f64>()
        .sqrt();
    2.0 * (d / 2.0).min(1.0).asin()
}

/// A vector of ℂ⁴; homogeneous coordinates of a point of CP³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVector4 {
    pub c: [Complex64; 4],
}

impl CVector4 {
    pub const fn new(c: [Complex64; 4]) -> Self {
        CVector4 { c }
    }

    pub fn zero() -> Self {
        CVector4 { c: [ZERO; 4] }
    }

    /// Basis vector e_k in the ordered basis {e₁, e₁j, e₂, e₂j}.
    pub fn basis(k: usize) -> Self {
        let mut c = [ZERO; 4];
        c[k] = Complex64::new(1.0, 0.0);
        CVector4 { c }
    }

    pub fn e1() -> Self {
        Self::basis(0)
    }
    pub fn e1j() -> Self {
        Self::basis(1)
    }
    pub fn e2() -> Self {
        Self::basis(2)
    }
    pub fn e2j() -> Self {
        Self::basis(3)
    }

    pub fn from_quats(q1: Quaternion, q2: Quaternion) -> Self {
        let (a, b) = q1.to_pair();
        let (c, d) = q2.to_pair();
        CVector4 { c: [a, b, c, d] }
    }

    pub fn to_quats(&self) -> (Quaternion, Quaternion) {
        (
            Quaternion::from_pair(self.c[0], self.c[1]),
            Quaternion::from_pair(self.c[2], self.c[3]),
        )
    }

    /// Right action of the quaternion j; antilinear with j² = −1.
    pub fn j(&self) -> Self {
        let c = &self.c;
        CVector4 {
            c: [-c[1].conj(), c[0].conj(), -c[3].conj(), c[2].conj()],
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CVector4 {
            c: self.c.map(|z| z * s),
        }
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bilinear contraction Σ aₖbₖ (covector applied to vector).
    pub fn dot(&self, o: &CVector4) -> Complex64 {
        (0..4).map(|k| self.c[k] * o.c[k]).sum()
    }

    /// Hermitian inner product Σ conj(aₖ)bₖ.
    pub fn hdot(&self, o: &CVector4) -> Complex64 {
        (0..4).map(|k| self.c[k].conj() * o.c[k]).sum()
    }

    pub fn conj(&self) -> Self {
        CVector4 {
            c: self.c.map(|z| z.conj()),
        }
    }

    /// Unit norm with the first non-negligible component real positive.
    pub fn normalized(&self) -> Result<Self> {
        let mut c = self.c;
        if phase_normalize(&mut c) {
            Ok(CVector4 { c })
        } else {
            Err(GeomError::ZeroVector)
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn to_cvec(&self) -> CVec {
        CVec::from_row_slice(&self.c)
    }

    pub fn from_slice(s: &[Complex64]) -> Self {
        CVector4 {
            c: [s[0], s[1], s[2], s[3]],
        }
    }

    pub fn dist(&self, o: &CVector4) -> f64 {
        projective_distance(&self.c, &o.c)
    }
}

impl Add for CVector4 {
    type Output = CVector4;
    fn add(self, o: CVector4) -> CVector4 {
        CVector4 {
            c: [
                self.c[0] + o.c[0],
                self.c[1] + o.c[1],
                self.c[2] + o.c[2],
                self.c[3] + o.c[3],
            ],
        }
    }
}

impl Sub for CVector4 {
    type Output = CVector4;
    fn sub(self, o: CVector4) -> CVector4 {
        CVector4 {
            c: [
                self.c[0] - o.c[0],
                self.c[1] - o.c[1],
                self.c[2] - o.c[2],
                self.c[3] - o.c[3],
            ],
        }
    }
}

impl Neg for CVector4 {
    type Output = CVector4;
    fn neg(self) -> CVector4 {
        CVector4 {
            c: self.c.map(|z| -z),
        }
    }
}

impl Mul<Complex64> for CVector4 {
    type Output = CVector4;
    fn mul(self, s: Complex64) -> CVector4 {
        self.scale(s)
    }
}

impl Index<usize> for CVector4 {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.c[k]
    }
}

/// An element of ∧²ℂ⁴ in Plücker coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector {
    pub p: [Complex64; 6],
}

impl Bivector {
    pub const fn new(p: [Complex64; 6]) -> Self {
        Bivector { p }
    }

    pub fn zero() -> Self {
        Bivector { p: [ZERO; 6] }
    }

    /// Basis bivector f_ab = e_a ∧ e_b (a < b) in storage position `k`.
    pub fn basis(k: usize) -> Self {
        let mut p = [ZERO; 6];
        p[k] = Complex64::new(1.0, 0.0);
        Bivector { p }
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        if a == b {
            return ZERO;
        }
        let (k, s) = plucker_index(a, b).expect("indices below 4");
        self.p[k] * s
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Bivector {
            p: self.p.map(|z| z * s),
        }
    }

    pub fn norm(&self) -> f64 {
        self.p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> Self {
        Bivector {
            p: self.p.map(|z| z.conj()),
        }
    }

    pub fn hdot(&self, o: &Bivector) -> Complex64 {
        (0..6).map(|k| self.p[k].conj() * o.p[k]).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let mut p = self.p;
        if phase_normalize(&mut p) {
            Ok(Bivector { p })
        } else {
            Err(GeomError::ZeroVector)
        }
    }

    /// The 4×4 antisymmetric matrix P with P_ab = p_ab.
    pub fn matrix(&self) -> CMat {
        CMat::from_fn(4, 4, |a, b| self.get(a, b))
    }

    pub fn to_cvec(&self) -> CVec {
        CVec::from_row_slice(&self.p)
    }

    pub fn from_slice(s: &[Complex64]) -> Self {
        Bivector {
            p: [s[0], s[1], s[2], s[3], s[4], s[5]],
        }
    }

    /// Antilinear action (v∧w)j = vj∧wj; an involution on ∧².
    pub fn j(&self) -> Self {
        let p = &self.p;
        Bivector {
            p: [
                p[0].conj(),
                p[4].conj(),
                -p[3].conj(),
                -p[2].conj(),
                p[1].conj(),
                p[5].conj(),
            ],
        }
    }

    pub fn dist(&self, o: &Bivector) -> f64 {
        projective_distance(&self.p, &o.p)
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(self, o: Bivector) -> Bivector {
        let mut p = self.p;
        for (x, y) in p.iter_mut().zip(o.p) {
            *x += y;
        }
        Bivector { p }
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, o: Bivector) -> Bivector {
        let mut p = self.p;
        for (x, y) in p.iter_mut().zip(o.p) {
            *x -= y;
        }
        Bivector { p }
    }
}

impl Neg for Bivector {
    type Output = Bivector;
    fn neg(self) -> Bivector {
        Bivector {
            p: self.p.map(|z| -z),
        }
    }
}

impl Mul<Complex64> for Bivector {
    type Output = Bivector;
    fn mul(self, s: Complex64) -> Bivector {
        self.scale(s)
    }
}

/// v ∧ w.
pub fn wedge(v: &CVector4, w: &CVector4) -> Bivector {
    let mut p = [ZERO; 6];
    for (k, &(a, b)) in PLUCKER_PAIRS.iter().enumerate() {
        p[k] = v.c[a] * w.c[b] - v.c[b] * w.c[a];
    }
    Bivector { p }
}

/// The symmetric bilinear form α∧β / (e₁∧e₁j∧e₂∧e₂j).
pub fn quadric_pair(a: &Bivector, b: &Bivector) -> Complex64 {
    let (p, q) = (&a.p, &b.p);
    p[0] * q[5] - p[1] * q[4] + p[2] * q[3] + p[3] * q[2] - p[4] * q[1] + p[5] * q[0]
}

/// Gram matrix of [`quadric_pair`] in the Plücker basis.
pub fn quadric_matrix() -> CMat {
    CMat::from_fn(6, 6, |r, c| {
        quadric_pair(&Bivector::basis(r), &Bivector::basis(c))
    })
}

/// Relative self-pairing |α∧α| / |α|².
pub fn decomposability_defect(a: &Bivector) -> f64 {
    let n = a.norm();
    if n == 0.0 {
        return 0.0;
    }
    quadric_pair(a, a).norm() / (n * n)
}

pub fn is_decomposable(a: &Bivector, tol: f64) -> bool {
    decomposability_defect(a) < tol
}

/// Relative pairing |α∧β| / (|α||β|).
pub fn incidence_defect(a: &Bivector, b: &Bivector) -> f64 {
    let n = a.norm() * b.norm();
    if n == 0.0 {
        return 0.0;
    }
    quadric_pair(a, b).norm() / n
}

pub fn lines_incident(a: &Bivector, b: &Bivector, tol: f64) -> bool {
    incidence_defect(a, b) < tol
}

/// Two vectors spanning the line of a decomposable bivector.
///
/// With p_ab the largest coordinate, returns (P·e_b, −P·e_a) whose wedge is p_ab·α.
pub fn line_factorize(a: &Bivector) -> Result<(CVector4, CVector4)> {
    if a.norm() == 0.0 {
        return Err(GeomError::ZeroVector);
    }
    if !is_decomposable(a, 1e-6) {
        return Err(GeomError::NotDecomposable);
    }
    let k = (0..6)
        .max_by(|&i, &j| a.p[i].norm().partial_cmp(&a.p[j].norm()).unwrap())
        .unwrap();
    let (ia, ib) = PLUCKER_PAIRS[k];
    let m = a.matrix();
    let col = |c: usize, s: f64| {
        CVector4::new([m[(0, c)] * s, m[(1, c)] * s, m[(2, c)] * s, m[(3, c)] * s])
    };
    let v = col(ib, 1.0);
    let w = col(ia, -1.0);
    Ok((v.normalized()?, w.normalized()?))
}

/// Matrix with the given vectors as columns.
pub fn columns(vs: &[CVector4]) -> CMat {
    CMat::from_fn(4, vs.len(), |r, c| vs[c].c[r])
}

/// Matrix with the given vectors as rows.
pub fn rows(vs: &[CVector4]) -> CMat {
    CMat::from_fn(vs.len(), 4, |r, c| vs[r].c[c])
}

/// Numerical rank of a set of vectors.
pub fn span_rank(vs: &[CVector4], tol: f64) -> usize {
    linalg::rank(&columns(vs), tol)
}

/// Rank oracle for incidence: the four spanning vectors are dependent.
pub fn incident_by_rank(a: &Bivector, b: &Bivector, tol: f64) -> Result<bool> {
    let (v1, w1) = line_factorize(a)?;
    let (v2, w2) = line_factorize(b)?;
    Ok(span_rank(&[v1, w1, v2, w2], tol) <= 3)
}

/// The common point of two incident, distinct lines.
pub fn line_meet(a: &Bivector, b: &Bivector) -> Result<CVector4> {
    let (u1, u2) = line_factorize(a)?;
    let (w1, w2) = line_factorize(b)?;
    let m = columns(&[u1, u2, -w1, -w2]);
    let (s, v) = linalg::svd_full(&m);
    if s[2] < 1e-9 * s[0] {
        return Err(GeomError::NonPointIntersection);
    }
    let x = v.column(3);
    (u1 * x[0] + u2 * x[1]).normalized()
}

/// A projective plane of CP³, held as an orthonormal spanning basis and a normal covector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPlane {
    pub basis: [CVector4; 3],
    /// Covector n with n·x = 0 exactly for x in the plane.
    pub normal: CVector4,
}

impl ProjPlane {
    /// Plane spanned by vectors of total rank exactly three.
    pub fn span(vs: &[CVector4], tol: f64) -> Result<Self> {
        let m = rows(vs);
        let (s, v) = linalg::svd_full(&m);
        let smax = s[0];
        let rk = s.iter().filter(|&&x| x > tol * smax).count();
        if rk != 3 {
            return Err(GeomError::DegenerateSpan);
        }
        // rows span the orthogonal complement of the last right singular vector
        let col = |k: usize| CVector4::new([v[(0, k)], v[(1, k)], v[(2, k)], v[(3, k)]]);
        let basis = [col(0).conj(), col(1).conj(), col(2).conj()];
        let normal = col(3).normalized()?;
        Ok(ProjPlane { basis, normal })
    }

    /// Plane whose points x satisfy n·x = 0.
    pub fn from_normal(n: &CVector4) -> Result<Self> {
        let m = rows(&[*n]);
        let ns = linalg::null_space(&m, 1e-12);
        if ns.len() != 3 {
            return Err(GeomError::ZeroVector);
        }
        let b: Vec<CVector4> = ns
            .iter()
            .map(|v| CVector4::from_slice(v.as_slice()))
            .collect();
        Ok(ProjPlane {
            basis: [b[0], b[1], b[2]],
            normal: n.normalized()?,
        })
    }

    pub fn residual(&self, v: &CVector4) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        self.normal.dot(v).norm() / n
    }

    pub fn contains(&self, v: &CVector4, tol: f64) -> bool {
        self.residual(v) < tol
    }

    /// True if both spanning vectors of the line lie in the plane.
    pub fn contains_line(&self, l: &Bivector, tol: f64) -> Result<bool> {
        let (v, w) = line_factorize(l)?;
        Ok(self.contains(&v, tol) && self.contains(&w, tol))
    }

    /// Image plane under the right j-action.
    pub fn j(&self) -> Self {
        ProjPlane::span(
            &[self.basis[0].j(), self.basis[1].j(), self.basis[2].j()],
            1e-12,
        )
        .expect("j is invertible")
    }

    pub fn dist(&self, o: &ProjPlane) -> f64 {
        self.normal.dist(&o.normal)
    }
}

/// Plane through three independent points.
pub fn plane_from(points: [CVector4; 3]) -> Result<ProjPlane> {
    ProjPlane::span(&points, 1e-10)
}

/// Intersection point of a plane and a line not contained in it.
pub fn meet_line(plane: &ProjPlane, line: &Bivector) -> Result<CVector4> {
    let (v, w) = line_factorize(line)?;
    let nv = plane.normal.dot(&v);
    let nw = plane.normal.dot(&w);
    if nv.norm() < 1e-10 && nw.norm() < 1e-10 {
        return Err(GeomError::LineInPlane);
    }
    (v * nw - w * nv).normalized()
}

/// The common point of three planes.
pub fn meet_planes(p1: &ProjPlane, p2: &ProjPlane, p3: &ProjPlane) -> Result<CVector4> {
    let m = rows(&[p1.normal, p2.normal, p3.normal]);
    let (s, v) = linalg::svd_full(&m);
    if s[2] < 1e-9 * s[0] {
        return Err(GeomError::NonPointIntersection);
    }
    CVector4::new([v[(0, 3)], v[(1, 3)], v[(2, 3)], v[(3, 3)]]).normalized()
}

/// The line common to two distinct planes.
pub fn meet_two_planes(p1: &ProjPlane, p2: &ProjPlane) -> Result<Bivector> {
    let m = rows(&[p1.normal, p2.normal]);
    let (s, v) = linalg::svd_full(&m);
    if s[1] < 1e-9 * s[0] {
        return Err(GeomError::NonPointIntersection);
    }
    let col = |k: usize| CVector4::new([v[(0, k)], v[(1, k)], v[(2, k)], v[(3, k)]]);
    wedge(&col(2), &col(3)).normalized()
}

/// Basis of {x : α∧x = 0 for every α in `bivs`}.
pub fn pair_complement(bivs: &[Bivector], tol: f64) -> Vec<Bivector> {
    let g = quadric_matrix();
    let m = CMat::from_fn(bivs.len(), 6, |r, c| {
        (0..6).map(|k| bivs[r].p[k] * g[(k, c)]).sum()
    });
    linalg::null_space(&m, tol)
        .iter()
        .map(|v| Bivector::from_slice(v.as_slice()))
        .collect()
}

/// The two points of Q⁴ on the projective line through u1, u2, in a deterministic order.
///
/// A line lying inside Q⁴ yields an error; a tangent line yields a repeated root.
pub fn quadric_roots(u1: &Bivector, u2: &Bivector) -> Result<[Bivector; 2]> {
    let a = quadric_pair(u1, u1);
    let b = quadric_pair(u1, u2);
    let c = quadric_pair(u2, u2);
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale < 1e-14 {
        return Err(GeomError::Degenerate(
            "pencil contained in the quadric".into(),
        ));
    }
    let disc = (b * b - a * c).sqrt();
    let mut roots = if a.norm() >= c.norm() {
        // s/t solves a s² + 2b s t + c t² = 0 with t = 1
        [*u1 * ((-b + disc) / a) + *u2, *u1 * ((-b - disc) / a) + *u2]
    } else {
        [*u1 + *u2 * ((-b + disc) / c), *u1 + *u2 * ((-b - disc) / c)]
    };
    for r in roots.iter_mut() {
        *r = r.normalized()?;
    }
    roots.sort_by(|x, y| lex_cmp(&x.p, &y.p));
    Ok(roots)
}

/// Lexicographic order on (re, im) pairs of normalized coordinates, insensitive to 1e-9 noise.
pub fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        for (u, v) in [(x.re, y.re), (x.im, y.im)] {
            if (u - v).abs() > 1e-9 {
                return u.partial_cmp(&v).unwrap_or(std::cmp::Ordering::Equal);
            }
        }
    }
    std::cmp::Ordering::Equal
}

pub fn contains(plane: &ProjPlane, v: &CVector4) -> bool {
    plane.contains(v, default_tol())
}
