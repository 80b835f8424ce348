//! Cross-ratios on CP¹, HP¹ and on conics of Q⁴, with reguli and their parameterization.
//!
//! Extended complex numbers are homogeneous pairs [z : w] so that ∞ = [1 : 0] is exact.
//! The complex cross-ratio is [z₁, z₂, z₃, z₄] = (z₁−z₂)(z₂−z₃)⁻¹(z₃−z₄)(z₄−z₁)⁻¹,
//! normalized so that [∞, 1, 0, λ] = λ.

use num_complex::Complex64;

use crate::linalg::{self, CMat, CVec};
use crate::proj4::{
    self, columns, line_factorize, line_meet, quadric_pair, wedge, Bivector, CVector4, ProjPlane,
};
use crate::quat::Quaternion;
use crate::twistor::{is_j_real, HPoint};
use crate::{GeomError, Result};

/// Relative threshold below which two points of CP¹ or HP¹ count as coincident.
const COINCIDENT_TOL: f64 = 1e-10;

/// A point of CP¹ = ℂ ∪ {∞} in homogeneous coordinates [z : w].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cp1 {
    pub z: Complex64,
    pub w: Complex64,
}

impl Cp1 {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Cp1 { z, w }
    }

    pub fn finite(z: Complex64) -> Self {
        Cp1 {
            z,
            w: Complex64::new(1.0, 0.0),
        }
    }

    pub fn infinity() -> Self {
        Cp1 {
            z: Complex64::new(1.0, 0.0),
            w: Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.z.norm_sqr() + self.w.norm_sqr()).sqrt()
    }

    /// z/w, or `None` at (or numerically near) ∞.
    pub fn value(&self) -> Option<Complex64> {
        if self.w.norm() <= 1e-14 * self.norm() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value().is_none()
    }

    /// Chordal-angle distance between the two projective points.
    pub fn dist(&self, o: &Cp1) -> f64 {
        proj4::projective_distance(&[self.z, self.w], &[o.z, o.w])
    }
}

impl From<Complex64> for Cp1 {
    fn from(z: Complex64) -> Self {
        Cp1::finite(z)
    }
}

/// The determinant z_a w_b − z_b w_a, the homogeneous difference z_a − z_b.
fn det(a: &Cp1, b: &Cp1) -> Complex64 {
    a.z * b.w - b.z * a.w
}

fn distinct(a: &Cp1, b: &Cp1) -> bool {
    det(a, b).norm() > COINCIDENT_TOL * a.norm() * b.norm()
}

/// The complex cross-ratio of four pairwise distinct points of CP¹.
///
/// For distinct points the value is finite and different from 0 and 1.
pub fn complex_cr(z1: Cp1, z2: Cp1, z3: Cp1, z4: Cp1) -> Result<Complex64> {
    let z = [z1, z2, z3, z4];
    for a in 0..4 {
        for b in a + 1..4 {
            if !distinct(&z[a], &z[b]) {
                return Err(GeomError::CoincidentPoints);
            }
        }
    }
    Ok(det(&z1, &z2) * det(&z3, &z4) / (det(&z2, &z3) * det(&z4, &z1)))
}

/// The unique z₄ with complex_cr(z₁, z₂, z₃, z₄) = λ.
pub fn complex_fourth_point(z1: Cp1, z2: Cp1, z3: Cp1, lambda: Complex64) -> Result<Cp1> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(GeomError::DegenerateLambda);
    }
    for (a, b) in [(&z1, &z2), (&z2, &z3), (&z1, &z3)] {
        if !distinct(a, b) {
            return Err(GeomError::CoincidentPoints);
        }
    }
    let d12 = det(&z1, &z2);
    let d23 = det(&z2, &z3);
    let z4 = Cp1::new(
        d12 * z3.z + lambda * d23 * z1.z,
        d12 * z3.w + lambda * d23 * z1.w,
    );
    let n = z4.norm();
    if n <= 0.0 || n.is_nan() || [z1, z2, z3].iter().any(|p| !distinct(p, &z4)) {
        return Err(GeomError::DegenerateLambda);
    }
    // rescale so long evolutions do not underflow
    Ok(Cp1::new(z4.z / n, z4.w / n))
}

/// The Möbius-invariant part {Re λ, |Im λ|} of a quaternionic cross-ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatioInvariant {
    pub re: f64,
    pub abs_im: f64,
}

impl CrossRatioInvariant {
    pub fn of(l: Quaternion) -> Self {
        CrossRatioInvariant {
            re: l.w,
            abs_im: l.im().norm(),
        }
    }

    pub fn dist(&self, o: &CrossRatioInvariant) -> f64 {
        (self.re - o.re).hypot(self.abs_im - o.abs_im)
    }
}

/// The quaternionic cross-ratio (q₁−q₂)(q₂−q₃)⁻¹(q₃−q₄)(q₄−q₁)⁻¹ in the standard affine chart.
///
/// A point at ∞ drops the two factors containing it, each pair contributing −1.
/// The value depends on the chart; its [`CrossRatioInvariant`] does not.
pub fn quat_cr(q1: &HPoint, q2: &HPoint, q3: &HPoint, q4: &HPoint) -> Result<Quaternion> {
    let pts = [q1, q2, q3, q4];
    for a in 0..4 {
        for b in a + 1..4 {
            if pts[a].dist(pts[b]) < COINCIDENT_TOL {
                return Err(GeomError::CoincidentPoints);
            }
        }
    }
    let aff: Vec<Option<Quaternion>> = pts.iter().map(|p| p.affine()).collect();
    let inf: Vec<usize> = (0..4).filter(|&k| aff[k].is_none()).collect();
    let v = |k: usize| aff[k].expect("finite point");
    Ok(match inf.as_slice() {
        [] => (v(0) - v(1)) * (v(1) - v(2)).inv() * (v(2) - v(3)) * (v(3) - v(0)).inv(),
        [0] => -((v(1) - v(2)).inv() * (v(2) - v(3))),
        [1] => -((v(2) - v(3)) * (v(3) - v(0)).inv()),
        [2] => -((v(0) - v(1)) * (v(3) - v(0)).inv()),
        [3] => -((v(0) - v(1)) * (v(1) - v(2)).inv()),
        _ => return Err(GeomError::CoincidentPoints),
    })
}

/// Which of the two stored transversals supplies regulus parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transversal {
    Primary,
    Secondary,
}

/// The regulus of three skew lines with two transversals S, S̃ and the normalized
/// frame p, q ∈ S, p̃, q̃ ∈ S̃ such that the generators are p∧p̃, q∧q̃, (p+q)∧(p̃+q̃).
#[derive(Debug, Clone, PartialEq)]
pub struct Regulus {
    pub generators: [Bivector; 3],
    /// Orthonormal basis (6×3) of the plane of P⁵ spanned by the generators.
    pub span: CMat,
    pub s: Bivector,
    pub s_tilde: Bivector,
    pub p: CVector4,
    pub q: CVector4,
    pub p_tilde: CVector4,
    pub q_tilde: CVector4,
}

/// The unique line through `x` meeting both `f2` and `f3`.
fn transversal_through(x: &CVector4, f2: &Bivector, f3: &Bivector) -> Result<Bivector> {
    let (v2, w2) = line_factorize(f2)?;
    let plane = ProjPlane::span(&[*x, v2, w2], 1e-9).map_err(|_| GeomError::GeneratorsNotSkew)?;
    let y = proj4::meet_line(&plane, f3).map_err(|_| GeomError::GeneratorsNotSkew)?;
    wedge(x, &y)
        .normalized()
        .map_err(|_| GeomError::GeneratorsNotSkew)
}

/// Solves x = a·u + b·v in the least-squares sense, returning (a, b, relative residual).
fn coords2(u: &CVector4, v: &CVector4, x: &CVector4) -> (Complex64, Complex64, f64) {
    let m = columns(&[*u, *v]);
    let c = linalg::lstsq(&m, &x.to_cvec());
    let r = (&m * &c - x.to_cvec()).norm() / x.norm();
    (c[0], c[1], r)
}

/// Rescales (u, v) so that r = u + v.
fn normalize_pair(u: CVector4, v: CVector4, r: &CVector4) -> Result<(CVector4, CVector4)> {
    let (a, b, res) = coords2(&u, &v, r);
    let small = 1e-10 * (a.norm() + b.norm());
    if res > 1e-6 || a.norm() <= small || b.norm() <= small {
        return Err(GeomError::DegenerateNormalization);
    }
    Ok((u * a, v * b))
}

fn check_generators(f: [&Bivector; 3]) -> Result<[Bivector; 3]> {
    let mut g = [Bivector::zero(); 3];
    for k in 0..3 {
        if !proj4::is_decomposable(f[k], 1e-8) {
            return Err(GeomError::NotDecomposable);
        }
        g[k] = f[k].normalized()?;
    }
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        if proj4::lines_incident(&g[a], &g[b], 1e-9) {
            return Err(GeomError::GeneratorsNotSkew);
        }
    }
    Ok(g)
}

/// The regulus of three pairwise skew lines, with transversals chosen constructively.
///
/// S passes through the first factor v of f₁. S̃ passes through vj when f₁ is
/// j-real (so S̃ = Sj for three fibers) and through the second factor otherwise.
pub fn regulus_build(f1: &Bivector, f2: &Bivector, f3: &Bivector) -> Result<Regulus> {
    let g = check_generators([f1, f2, f3])?;
    let (v, w) = line_factorize(&g[0])?;
    let x2 = if is_j_real(&g[0], 1e-8) { v.j() } else { w };
    let s = transversal_through(&v, &g[1], &g[2])?;
    let st = transversal_through(&x2, &g[1], &g[2])?;
    Regulus::from_transversals(g, s, st)
}

/// The regulus of three skew lines with a prescribed transversal S (a sphere through their circle).
///
/// For three fibers S̃ = Sj; otherwise S̃ is the transversal through a point of f₁ off S.
pub fn regulus_with_transversal(
    f1: &Bivector,
    f2: &Bivector,
    f3: &Bivector,
    s: &Bivector,
) -> Result<Regulus> {
    let g = check_generators([f1, f2, f3])?;
    let s = s.normalized()?;
    if g.iter().any(|f| !proj4::lines_incident(f, &s, 1e-8)) {
        return Err(GeomError::Degenerate(
            "line is not a transversal of the generators".into(),
        ));
    }
    let st = if g.iter().all(|f| is_j_real(f, 1e-8)) && !is_j_real(&s, 1e-8) {
        s.j().normalized()?
    } else {
        let p1 = line_meet(&s, &g[0])?;
        let (v, w) = line_factorize(&g[0])?;
        let x2 = if p1.hdot(&v).norm() / v.norm() < p1.hdot(&w).norm() / w.norm() {
            v
        } else {
            w
        };
        transversal_through(&x2, &g[1], &g[2])?
    };
    Regulus::from_transversals(g, s, st)
}

impl Regulus {
    fn from_transversals(g: [Bivector; 3], s: Bivector, st: Bivector) -> Result<Self> {
        if s.dist(&st) < 1e-8 {
            return Err(GeomError::Degenerate("transversals coincide".into()));
        }
        let meet =
            |l: &Bivector, f: &Bivector| line_meet(l, f).map_err(|_| GeomError::GeneratorsNotSkew);
        let (p, q) = normalize_pair(meet(&s, &g[0])?, meet(&s, &g[1])?, &meet(&s, &g[2])?)?;
        let (pt, qt) = normalize_pair(meet(&st, &g[0])?, meet(&st, &g[1])?, &meet(&st, &g[2])?)?;
        let gm = CMat::from_columns(&g.iter().map(|b| b.to_cvec()).collect::<Vec<CVec>>());
        let span = linalg::dominant_columns(&gm, 3);
        Ok(Regulus {
            generators: g,
            span,
            s,
            s_tilde: st,
            p,
            q,
            p_tilde: pt,
            q_tilde: qt,
        })
    }

    /// (p z + q w) ∧ (p̃ z + q̃ w): z = ∞, 0, 1 give the three generators.
    pub fn point(&self, z: Cp1) -> Bivector {
        let a = self.p * z.z + self.q * z.w;
        let b = self.p_tilde * z.z + self.q_tilde * z.w;
        let l = wedge(&a, &b);
        l.normalized().unwrap_or(l)
    }

    /// Distance of a line from the regulus conic: |α∧α| plus the residual off the generator plane.
    pub fn conic_defect(&self, a: &Bivector) -> f64 {
        let Ok(u) = a.normalized() else {
            return f64::INFINITY;
        };
        let x = u.to_cvec();
        let proj = &self.span * (self.span.adjoint() * &x);
        quadric_pair(&u, &u).norm() + (x - proj).norm()
    }

    /// The parameter of a regulus line, read off where it meets the chosen transversal.
    pub fn parameter(&self, a: &Bivector, via: Transversal) -> Result<Cp1> {
        if self.conic_defect(a) > 1e-7 {
            return Err(GeomError::NotOnConic);
        }
        let (t, u, v) = match via {
            Transversal::Primary => (&self.s, &self.p, &self.q),
            Transversal::Secondary => (&self.s_tilde, &self.p_tilde, &self.q_tilde),
        };
        let x = line_meet(a, t)?;
        let (z, w, _) = coords2(u, v, &x);
        Ok(Cp1::new(z, w))
    }
}

/// `Regulus::point` as a free function.
pub fn regulus_point(r: &Regulus, z: Cp1) -> Bivector {
    r.point(z)
}

/// Steiner cross-ratio of four conic points, via their coordinates on S.
pub fn steiner_cr(
    r: &Regulus,
    a1: &Bivector,
    a2: &Bivector,
    a3: &Bivector,
    a4: &Bivector,
) -> Result<Complex64> {
    steiner_cr_via(r, [a1, a2, a3, a4], Transversal::Primary)
}

/// Steiner cross-ratio computed on either transversal.
pub fn steiner_cr_via(r: &Regulus, a: [&Bivector; 4], via: Transversal) -> Result<Complex64> {
    let z = [
        r.parameter(a[0], via)?,
        r.parameter(a[1], via)?,
        r.parameter(a[2], via)?,
        r.parameter(a[3], via)?,
    ];
    complex_cr(z[0], z[1], z[2], z[3])
}

/// The conic point with Steiner cross-ratio λ relative to (f₁, f₂, f₃).
///
/// The generators sit at parameters ∞, 0, 1, so the point is at parameter 1 − λ.
/// The result does not depend on the transversal choice.
pub fn steiner_fourth_point(
    f1: &Bivector,
    f2: &Bivector,
    f3: &Bivector,
    lambda: Complex64,
) -> Result<Bivector> {
    if !(lambda.re.is_finite() && lambda.im.is_finite())
        || lambda.norm() < 1e-12
        || (lambda - 1.0).norm() < 1e-12
    {
        return Err(GeomError::DegenerateLambda);
    }
    let r = regulus_build(f1, f2, f3)?;
    Ok(r.point(Cp1::finite(Complex64::new(1.0, 0.0) - lambda)))
}
