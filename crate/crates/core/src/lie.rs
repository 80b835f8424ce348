//! The three-dimensional reduction: quaternionic hermitian forms, the Lie real
//! structure ρ(l) = l^⊥ on Q⁴, the light-cone model of S³, the circle space Q³
//! and the touching-coins configuration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat, CVec};
use crate::proj4::{
    decomposability_defect, pair_complement, quadric_matrix, quadric_pair, quadric_roots, wedge,
    Bivector, CVector4, PLUCKER_PAIRS,
};
use crate::quat::Quaternion;
use crate::twistor::{
    classify_contact, fiber_point, real_form_basis, real_gram, twistor_fiber, ContactClass,
    ContactKind, HPoint,
};
use crate::{GeomError, Result};

/// A quaternionic hermitian form 𝔥(v, w) = Σ v̄ₐ mₐᵦ wᵦ on ℍ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatHermitianForm {
    pub m: [[Quaternion; 2]; 2],
}

impl Default for QuatHermitianForm {
    /// [[0, 1], [1, 0]], whose null points are Im(ℍ) ∪ {∞}.
    fn default() -> Self {
        QuatHermitianForm {
            m: [
                [Quaternion::ZERO, Quaternion::ONE],
                [Quaternion::ONE, Quaternion::ZERO],
            ],
        }
    }
}

impl QuatHermitianForm {
    pub fn new(m: [[Quaternion; 2]; 2]) -> Result<Self> {
        let herm = m[0][0].im().norm() + m[1][1].im().norm() + (m[1][0] - m[0][1].conj()).norm();
        let scale = m.iter().flatten().map(|q| q.norm()).fold(0.0, f64::max);
        if scale == 0.0 || herm > 1e-12 * scale {
            return Err(GeomError::DegenerateForm);
        }
        Ok(QuatHermitianForm { m })
    }

    /// 𝔥(v, w) for ℂ⁴ vectors read as quaternionic pairs.
    pub fn eval(&self, v: &CVector4, w: &CVector4) -> Quaternion {
        let (v0, v1) = v.to_quats();
        let (w0, w1) = w.to_quats();
        let (v, w) = ([v0, v1], [w0, w1]);
        let mut s = Quaternion::ZERO;
        for (va, row) in v.iter().zip(&self.m) {
            for (wb, m) in w.iter().zip(row) {
                s = s + va.conj() * *m * *wb;
            }
        }
        s
    }
}

/// The parts of 𝔥 = h + jω as matrices: h(v, w) = v^H·H·w and ω(v, w) = vᵀ·Ω·w.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedForm {
    pub h: CMat,
    pub omega: CMat,
}

impl DecomposedForm {
    pub fn h(&self, v: &CVector4, w: &CVector4) -> Complex64 {
        (v.to_cvec().adjoint() * &self.h * w.to_cvec())[(0, 0)]
    }

    pub fn omega(&self, v: &CVector4, w: &CVector4) -> Complex64 {
        (v.to_cvec().transpose() * &self.omega * w.to_cvec())[(0, 0)]
    }

    /// ω as a linear functional on ∧²ℂ⁴.
    pub fn omega_on(&self, a: &Bivector) -> Complex64 {
        PLUCKER_PAIRS
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| self.omega[(i, j)] * a.p[k])
            .sum()
    }

    /// The bivector Ω* with quadric_pair(Ω*, α) = ω(α), so that ω° = (Ω*)^⊥.
    pub fn omega_dual(&self) -> Bivector {
        let coef = CVec::from_fn(6, |k, _| {
            let (i, j) = PLUCKER_PAIRS[k];
            self.omega[(i, j)]
        });
        let g = quadric_matrix();
        let x = g.try_inverse().expect("the quadric is nondegenerate") * coef;
        Bivector::from_slice(x.as_slice())
    }

    /// The 6×6 matrix R with ρ̃(α) = R·ᾱ, normalized so that ρ̃ is an involution.
    pub fn rho_matrix(&self) -> CMat {
        let ht = self.h.transpose();
        let col = |a: usize| CVector4::new([ht[(0, a)], ht[(1, a)], ht[(2, a)], ht[(3, a)]]);
        let lam = CMat::from_fn(6, 6, |r, c| {
            let (a, b) = PLUCKER_PAIRS[c];
            wedge(&col(a), &col(b)).p[r]
        });
        let r = quadric_matrix().try_inverse().expect("nondegenerate") * lam;
        let sq = &r * r.map(|z| z.conj());
        let k = sq.trace() / 6.0;
        r / Complex64::new(k.norm().sqrt(), 0.0)
    }

    /// ρ̃(α) = R·ᾱ.
    pub fn rho_lift(&self, a: &Bivector) -> Bivector {
        let x = self.rho_matrix() * a.to_cvec().map(|z| z.conj());
        Bivector::from_slice(x.as_slice())
    }
}

/// Splits 𝔥 into the hermitian part h and the alternating part ω.
pub fn decompose_form(form: &QuatHermitianForm) -> Result<DecomposedForm> {
    let e = CVector4::basis;
    let mut h = CMat::zeros(4, 4);
    let mut omega = CMat::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let (z1, z2) = form.eval(&e(a), &e(b)).to_pair();
            h[(a, b)] = z1;
            omega[(a, b)] = z2;
        }
    }
    if linalg::sv_ratio(&h, 4) < 1e-12 {
        return Err(GeomError::DegenerateForm);
    }
    Ok(DecomposedForm { h, omega })
}

/// The h-perpendicular line l^⊥ = {x : h(x, l) = 0}.
pub fn rho(l: &Bivector, form: &DecomposedForm) -> Result<Bivector> {
    if decomposability_defect(l) > 1e-8 {
        return Err(GeomError::NotDecomposable);
    }
    let (v, w) = crate::proj4::line_factorize(l)?;
    let rows = CMat::from_fn(2, 4, |r, c| {
        let x = if r == 0 { v } else { w };
        (x.to_cvec().adjoint() * &form.h)[(0, c)]
    });
    let ns = linalg::null_space(&rows, 1e-10);
    if ns.len() != 2 {
        return Err(GeomError::DegenerateForm);
    }
    let x = |k: usize| CVector4::from_slice(ns[k].as_slice());
    wedge(&x(0), &x(1)).normalized()
}

/// True iff l = l^⊥: the sphere or point of l lies in the three-sphere of the form.
pub fn is_lie_real(l: &Bivector, form: &DecomposedForm, tol: f64) -> Result<bool> {
    Ok(rho(l, form)?.dist(&l.normalized()?) < tol)
}

/// The basis {v∧vj, w∧wj, v∧wj, vj∧w, ½(v∧w − vj∧wj), ½(v∧w + vj∧wj)}, each element ρ-fixed as a line.
pub fn lie_basis(v: &CVector4, w: &CVector4) -> [Bivector; 6] {
    let (vj, wj) = (v.j(), w.j());
    let half = Complex64::new(0.5, 0.0);
    let a = wedge(v, w);
    let b = wedge(&vj, &wj);
    [
        wedge(v, &vj),
        wedge(w, &wj),
        wedge(v, &wj),
        wedge(&vj, w),
        (a - b) * half,
        (a + b) * half,
    ]
}

/// Signatures of the Q⁴ form on the Lie real set and on its ω° part.
#[derive(Debug, Clone, PartialEq)]
pub struct LieSignatures {
    /// On the real span of the phase-corrected basis; expected (2, 4).
    pub full: (usize, usize),
    /// On the real part of ω°; expected (1, 4).
    pub omega_restricted: (usize, usize),
    /// On the real span of the basis taken with unit phases, which is not ρ̃-fixed.
    pub unphased: (usize, usize),
    /// Basis elements rescaled by e^{i·arg(cₐ)/2} where ρ̃(Bₐ) = cₐ·Bₐ.
    pub basis: [Bivector; 6],
    /// Largest |ρ̃(B′ₐ) − B′ₐ| over the corrected basis.
    pub fixed_residual: f64,
}

fn signature_of(g: &DMatrix<f64>) -> (usize, usize) {
    let scale = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    linalg::signature(g, 1e-9 * scale.max(1e-300))
}

/// Computes the signature data for the basis built on ∞ and 0.
pub fn lie_signature_report(form: &DecomposedForm) -> Result<LieSignatures> {
    let b = lie_basis(&CVector4::e1(), &CVector4::e2());
    let mut basis = b;
    let mut fixed_residual: f64 = 0.0;
    for (k, x) in b.iter().enumerate() {
        let r = form.rho_lift(x);
        let c = x.hdot(&r) / x.hdot(x);
        if (r - *x * c).norm() > 1e-9 * r.norm().max(1.0) {
            return Err(GeomError::Degenerate("basis element not fixed by ρ".into()));
        }
        basis[k] = *x * Complex64::from_polar(1.0, c.arg() / 2.0);
        fixed_residual = fixed_residual.max((form.rho_lift(&basis[k]) - basis[k]).norm());
    }
    let full = signature_of(&real_gram(&basis));
    let unphased = signature_of(&real_gram(&b));
    // real combinations x with ω(Σ xₐB′ₐ) = 0
    let f: Vec<Complex64> = basis.iter().map(|x| form.omega_on(x)).collect();
    let cond = DMatrix::from_fn(2, 6, |r, c| if r == 0 { f[c].re } else { f[c].im });
    let sub = real_null_space(&cond);
    let g = real_gram(&basis);
    let restricted = sub.transpose() * g * &sub;
    Ok(LieSignatures {
        full,
        omega_restricted: signature_of(&restricted),
        unphased,
        basis,
        fixed_residual,
    })
}

fn real_null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let (s, _, v) = linalg::svd_sorted(padded, false, true);
    let v = v.expect("v requested");
    let smax = s[0];
    let rk = s.iter().filter(|&&x| x > 1e-10 * smax).count();
    v.columns(rk, n - rk).into_owned()
}

/// |ω(fiber(p))|, zero iff p lies in the three-sphere.
pub fn three_sphere_defect(p: &HPoint, form: &DecomposedForm) -> f64 {
    form.omega_on(&twistor_fiber(p)).norm()
}

/// The two oriented representatives {[λ], [λj]} ⊂ Q³ \ S³ of the circle through three points of S³.
pub fn circle_to_q3(
    p1: &HPoint,
    p2: &HPoint,
    p3: &HPoint,
    form: &DecomposedForm,
) -> Result<(Bivector, Bivector)> {
    for p in [p1, p2, p3] {
        if three_sphere_defect(p, form) > 1e-8 {
            return Err(GeomError::Degenerate(
                "point outside the three-sphere".into(),
            ));
        }
    }
    if p1.dist(p2) < 1e-9 || p2.dist(p3) < 1e-9 || p1.dist(p3) < 1e-9 {
        return Err(GeomError::CoincidentPoints);
    }
    let conds = [
        twistor_fiber(p1),
        twistor_fiber(p2),
        twistor_fiber(p3),
        form.omega_dual(),
    ];
    let w = pair_complement(&conds, 1e-9);
    if w.len() != 2 {
        return Err(GeomError::CoincidentPoints);
    }
    let [a, b] = quadric_roots(&w[0], &w[1])?;
    if a.dist(&b.j().normalized()?) > 1e-7 {
        return Err(GeomError::Degenerate("roots are not a j-pair".into()));
    }
    Ok((a, b))
}

/// The point where two oriented circles touch, if they do.
///
/// The S³ points on both representatives are the real null vectors of the complement of
/// {λ, λj, μ, μj, Ω*}. Tangent circles lie on a common sphere, so the complement is
/// two-dimensional and its real form is semidefinite with a single null direction.
pub fn circle_contact_point(
    a: &Bivector,
    b: &Bivector,
    form: &DecomposedForm,
) -> Result<Option<HPoint>> {
    let comp = pair_complement(&[*a, a.j(), *b, b.j(), form.omega_dual()], 1e-9);
    match comp.len() {
        1 => return Ok(None),
        2 => {}
        _ => return Err(GeomError::Degenerate("coincident circles".into())),
    }
    let real = real_form_basis(&comp);
    if real.len() != 2 {
        return Err(GeomError::Degenerate(
            "complement is not j-invariant".into(),
        ));
    }
    let eig = real_gram(&real).symmetric_eigen();
    let (lo, hi) = if eig.eigenvalues[0].abs() < eig.eigenvalues[1].abs() {
        (0, 1)
    } else {
        (1, 0)
    };
    if eig.eigenvalues[lo].abs() > 1e-8 * eig.eigenvalues[hi].abs() {
        return Ok(None);
    }
    let x = real[0] * Complex64::new(eig.eigenvectors[(0, lo)], 0.0)
        + real[1] * Complex64::new(eig.eigenvectors[(1, lo)], 0.0);
    Ok(Some(fiber_point(&x)?))
}

/// True iff the circles lie on one two-sphere of S³.
///
/// The points of a circle span the 3-dimensional complement of {λ, λj, Ω*}; a two-sphere of S³
/// is a hyperplane section of the 5-dimensional ω°, so cospherical circles span at most 4 dimensions.
pub fn on_common_sphere(circles: &[Bivector], form: &DecomposedForm) -> bool {
    let omega = form.omega_dual();
    let vs: Vec<Bivector> = circles
        .iter()
        .flat_map(|c| pair_complement(&[*c, c.j(), omega], 1e-9))
        .collect();
    let m = CMat::from_fn(6, vs.len(), |r, c| vs[c].p[r]);
    linalg::rank(&m, 1e-8) <= 4
}

/// Outcome of the touching-coins verification.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchingCoinsReport {
    /// Contact point of circles k and k+1 (cyclically), `None` when they do not touch.
    pub contact_points: Vec<Option<HPoint>>,
    /// classify_contact of consecutive representatives.
    pub pair_classes: Vec<ContactClass>,
    /// The two-sphere through the four contact points.
    pub sphere: Option<Bivector>,
    /// classify_contact of that sphere against each representative.
    pub sphere_classes: Vec<ContactClass>,
    /// Largest incidence residual of the contact points on the sphere and their two circles.
    pub residual: f64,
    /// True iff all four circles touch and the sphere half-touches every representative.
    pub holds: bool,
}

/// Checks that the sphere through the contact points of four cyclically touching circles
/// half-touches each circle's representative sphere.
pub fn touching_coins_check(
    circles: &[Bivector; 4],
    form: &DecomposedForm,
) -> Result<TouchingCoinsReport> {
    let reps: Vec<Bivector> = circles
        .iter()
        .map(|c| c.normalized())
        .collect::<Result<_>>()?;
    if on_common_sphere(&reps, form) {
        return Err(GeomError::Degenerate("circles on a common sphere".into()));
    }
    let mut contact_points = Vec::new();
    let mut pair_classes = Vec::new();
    for k in 0..4 {
        let (a, b) = (&reps[k], &reps[(k + 1) % 4]);
        pair_classes.push(classify_contact(a, b)?);
        contact_points.push(circle_contact_point(a, b, form)?);
    }
    let mut report = TouchingCoinsReport {
        contact_points: contact_points.clone(),
        pair_classes,
        sphere: None,
        sphere_classes: vec![],
        residual: f64::INFINITY,
        holds: false,
    };
    let Some(pts) = contact_points.into_iter().collect::<Option<Vec<HPoint>>>() else {
        return Ok(report);
    };
    let fibers: Vec<Bivector> = pts.iter().map(twistor_fiber).collect();
    let comp = pair_complement(&fibers, 1e-9);
    if comp.len() != 2 {
        return Err(GeomError::Degenerate("contact points concircular".into()));
    }
    let [sigma, _] = quadric_roots(&comp[0], &comp[1])?;
    let mut residual: f64 = 0.0;
    for (k, f) in fibers.iter().enumerate() {
        for x in [&sigma, &reps[k], &reps[(k + 1) % 4]] {
            residual = residual.max(quadric_pair(f, x).norm());
        }
    }
    let sphere_classes: Vec<ContactClass> = reps
        .iter()
        .map(|r| classify_contact(&sigma, r))
        .collect::<Result<_>>()?;
    report.holds = sphere_classes
        .iter()
        .all(|c| c.kind == ContactKind::HalfTouch);
    report.sphere = Some(sigma);
    report.sphere_classes = sphere_classes;
    report.residual = residual;
    Ok(report)
}

/// The S³ point of an imaginary quaternion x·i + y·j + z·k.
pub fn r3_point(x: f64, y: f64, z: f64) -> HPoint {
    HPoint::from_affine(Quaternion::new(0.0, x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twistor::is_j_real;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type V3 = [f64; 3];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn std_form() -> DecomposedForm {
        decompose_form(&QuatHermitianForm::default()).unwrap()
    }

    fn rand_v(rng: &mut ChaCha8Rng) -> CVector4 {
        CVector4::new([0; 4].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
    }

    #[test]
    fn decomposition_identities() {
        let f = std_form();
        let (e1, e2) = (CVector4::e1(), CVector4::e2());
        assert!((f.h(&e1, &e2) - c(1., 0.)).norm() < 1e-15);
        assert!(f.omega(&e1, &e2).norm() < 1e-15);
        assert_eq!(linalg::signature(&f.h.map(|z| z.re), 1e-12), (2, 2));
        assert!(f.h.map(|z| z.im).norm() < 1e-15 || linalg::hermitian_eigenvalues(&f.h).len() == 4);
        let ev = linalg::hermitian_eigenvalues(&f.h);
        assert_eq!(ev.iter().filter(|&&x| x > 0.0).count(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = QuatHermitianForm::new([
            [Quaternion::real(0.7), Quaternion::new(0.2, 1.0, -0.3, 0.5)],
            [
                Quaternion::new(0.2, -1.0, 0.3, -0.5),
                Quaternion::real(-1.3),
            ],
        ])
        .unwrap();
        for form in [f, decompose_form(&q).unwrap()] {
            assert!((&form.h - form.h.adjoint()).norm() < 1e-14);
            assert!((&form.omega + form.omega.transpose()).norm() < 1e-14);
            for _ in 0..100 {
                let (x, y) = (rand_v(&mut rng), rand_v(&mut rng));
                assert!((form.omega(&x, &y) + form.h(&x, &y.j()).conj()).norm() < 1e-12);
                assert!((form.omega(&x, &y.j()) - form.h(&x, &y).conj()).norm() < 1e-12);
                assert!(form.h(&x, &x.j()).norm() < 1e-12);
                assert!((form.h(&x, &x) - form.omega(&x, &x.j()).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_form_is_rejected() {
        let z = Quaternion::ZERO;
        let one = Quaternion::ONE;
        assert_eq!(
            decompose_form(&QuatHermitianForm::new([[one, one], [one, one]]).unwrap()),
            Err(GeomError::DegenerateForm)
        );
        assert_eq!(
            QuatHermitianForm::new([[z, Quaternion::I], [Quaternion::I, z]]),
            Err(GeomError::DegenerateForm)
        );
    }

    #[test]
    fn rho_examples() {
        let f = std_form();
        for p in [
            HPoint::infinity(),
            r3_point(0.0, 0.0, 0.0),
            r3_point(0.3, -1.2, 2.0),
        ] {
            assert!(is_lie_real(&twistor_fiber(&p), &f, 1e-9).unwrap());
        }
        assert!(!is_lie_real(
            &twistor_fiber(&HPoint::from_affine(Quaternion::ONE)),
            &f,
            1e-6
        )
        .unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let l = wedge(&rand_v(&mut rng), &rand_v(&mut rng))
                .normalized()
                .unwrap();
            let r = rho(&l, &f).unwrap();
            assert!(rho(&r, &f).unwrap().dist(&l) < 1e-9);
            let lift = f.rho_lift(&l).normalized().unwrap();
            assert!(lift.dist(&r) < 1e-9);
            // antilinear: ρ̃(cα) = c̄ ρ̃(α)
            let z = c(0.3, -1.7);
            assert!((f.rho_lift(&(l * z)) - f.rho_lift(&l) * z.conj()).norm() < 1e-12);
        }
        assert_eq!(
            rho(&(Bivector::basis(0) + Bivector::basis(5)), &f),
            Err(GeomError::NotDecomposable)
        );
    }

    #[test]
    fn signatures() {
        let rep = lie_signature_report(&std_form()).unwrap();
        assert_eq!(rep.full, (2, 4));
        assert_eq!(rep.omega_restricted, (1, 4));
        assert_eq!(rep.full.0 + rep.full.1, 6);
        assert_eq!(rep.unphased, (3, 3));
        assert!(rep.fixed_residual < 1e-12);
    }

    #[test]
    fn lie_real_j_real_points_lie_in_s3() {
        let f = std_form();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: [f64; 4] = [0; 4].map(|_| rng.gen_range(-2.0..2.0));
            let imag = rng.gen_bool(0.5);
            let q = Quaternion::new(if imag { 0.0 } else { x[0] }, x[1], x[2], x[3]);
            let fib = twistor_fiber(&HPoint::from_affine(q));
            assert_eq!(
                is_lie_real(&fib, &f, 1e-9).unwrap(),
                imag || x[0].abs() < 1e-9
            );
            assert_eq!(
                three_sphere_defect(&HPoint::from_affine(q), &f) < 1e-9,
                imag
            );
        }
    }

    fn circle_points(center: V3, u: V3, v: V3, r: f64, n: usize) -> Vec<HPoint> {
        (0..n)
            .map(|k| {
                let t = 0.37 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let p: Vec<f64> = (0..3)
                    .map(|i| center[i] + r * (t.cos() * u[i] + t.sin() * v[i]))
                    .collect();
                r3_point(p[0], p[1], p[2])
            })
            .collect()
    }

    #[test]
    fn circle_representatives() {
        let f = std_form();
        let s = 1.0 / 2f64.sqrt();
        let pts = circle_points([0.3, -0.2, 1.0], [s, s, 0.0], [0.0, 0.0, 1.0], 1.4, 40);
        let (l, lj) = circle_to_q3(&pts[0], &pts[7], &pts[19], &f).unwrap();
        assert!(l.dist(&lj.j().normalized().unwrap()) < 1e-9);
        assert!(!is_j_real(&l, 1e-6));
        for p in &pts {
            assert!(quadric_pair(&twistor_fiber(p), &l).norm() < 1e-9);
        }
        let (l2, _) = circle_to_q3(&pts[3], &pts[25], &pts[31], &f).unwrap();
        assert!(l2.dist(&l) < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let off = r3_point(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            assert!(quadric_pair(&twistor_fiber(&off), &l).norm() > 1e-6);
        }
        // a line through ∞
        let (m, _) = circle_to_q3(
            &HPoint::infinity(),
            &r3_point(0., 0., 0.),
            &r3_point(1., 0., 0.),
            &f,
        )
        .unwrap();
        assert!(quadric_pair(&twistor_fiber(&r3_point(-3.5, 0., 0.)), &m).norm() < 1e-9);
        assert_eq!(
            circle_to_q3(&pts[0], &pts[0], &pts[1], &f),
            Err(GeomError::CoincidentPoints)
        );
        assert!(circle_to_q3(&HPoint::from_affine(Quaternion::ONE), &pts[0], &pts[1], &f).is_err());
    }

    fn add(a: V3, b: V3) -> V3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    fn sc(a: V3, s: f64) -> V3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    fn dot(a: V3, b: V3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    fn unit(a: V3) -> V3 {
        sc(a, 1.0 / dot(a, a).sqrt())
    }

    fn on_unit_sphere(theta: f64, phi: f64) -> V3 {
        [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ]
    }

    /// The circle through a and b leaving a along the normal of the unit sphere; it meets the sphere orthogonally.
    fn orthogonal_circle(a: V3, b: V3, f: &DecomposedForm) -> Bivector {
        let d = add(b, sc(a, -1.0));
        let u = unit(add(d, sc(a, -dot(d, a))));
        let r = dot(d, d) / (2.0 * dot(u, d));
        let top = add(add(a, sc(u, r)), sc(a, r));
        let p = |x: V3| r3_point(x[0], x[1], x[2]);
        circle_to_q3(&p(a), &p(b), &p(top), f).unwrap().0
    }

    fn coin_chain(ts: &[V3; 4], f: &DecomposedForm) -> [Bivector; 4] {
        [0, 1, 2, 3].map(|k| orthogonal_circle(ts[k], ts[(k + 1) % 4], f))
    }

    #[test]
    fn touching_coins_half_touch() {
        let f = std_form();
        let ts = [
            on_unit_sphere(0.4, 0.1),
            on_unit_sphere(1.2, 1.9),
            on_unit_sphere(2.0, 3.3),
            on_unit_sphere(1.1, 4.6),
        ];
        let circles = coin_chain(&ts, &f);
        let rep = touching_coins_check(&circles, &f).unwrap();
        for (k, t) in ts.iter().enumerate() {
            let p = rep.contact_points[(k + 3) % 4].expect("circles touch");
            assert!(p.dist(&r3_point(t[0], t[1], t[2])) < 1e-7);
        }
        assert!(rep.residual < 1e-8);
        assert!(
            rep.holds,
            "{:?}",
            rep.sphere_classes
                .iter()
                .map(|c| c.kind)
                .collect::<Vec<_>>()
        );
        let unit_sphere = rep.sphere.unwrap();
        assert!(is_lie_real(&unit_sphere, &f, 1e-8).unwrap());
        // perturbing one circle breaks two contacts
        let mut bad = circles;
        bad[1] = orthogonal_circle(add(ts[1], [0.0, 0.0, 0.05]), ts[2], &f);
        let rep = touching_coins_check(&bad, &f).unwrap();
        assert!(!rep.holds);
        assert!(rep.contact_points[0].is_none());
        assert!(matches!(
            rep.pair_classes[0].kind,
            ContactKind::Disjoint | ContactKind::Transverse
        ));
    }

    #[test]
    fn coplanar_coins_lie_on_a_common_sphere() {
        let f = std_form();
        let ts = [0.2, 1.5, 3.0, 4.4].map(|a: f64| [a.cos(), a.sin(), 0.0]);
        let circles = coin_chain(&ts, &f);
        assert_eq!(
            touching_coins_check(&circles, &f),
            Err(GeomError::Degenerate("circles on a common sphere".into()))
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rho_is_an_antiholomorphic_involution(re in proptest::collection::vec(-1.0..1.0f64, 8), im in proptest::collection::vec(-1.0..1.0f64, 8)) {
            let f = std_form();
            let v = CVector4::new([0, 1, 2, 3].map(|k| c(re[k], im[k])));
            let w = CVector4::new([4, 5, 6, 7].map(|k| c(re[k], im[k])));
            let Ok(l) = wedge(&v, &w).normalized() else { return Ok(()) };
            prop_assume!(l.norm() > 1e-3);
            let r = f.rho_lift(&l);
            prop_assert!((f.rho_lift(&r) - l).norm() < 1e-9);
            // ρ preserves the quadric up to conjugation
            let (a, b) = (l, Bivector::basis(2) + Bivector::basis(3) * c(0.0, 1.0));
            prop_assert!((quadric_pair(&f.rho_lift(&a), &f.rho_lift(&b)) - quadric_pair(&a, &b).conj()).norm() < 1e-9);
        }
    }
}
