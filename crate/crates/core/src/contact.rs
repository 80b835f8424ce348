//! Null lines of Q⁴ as contact and half-contact elements, and principal contact
//! element nets over circular and complex cross-ratio base nets.
//!
//! A null line is the pencil of lines of CP³ through a point inside a plane.
//! It holds a twistor fiber (a real point of Q⁴) exactly when the point lies on
//! the fiber Π ∩ Πj, in which case its members are the spheres touching at that point.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::nets::{Face, LatticeNet};
use crate::proj4::{
    line_factorize, line_meet, meet_line, meet_two_planes, projective_distance, wedge, Bivector,
    CVector4, ProjPlane,
};
use crate::twistor::{is_j_real, line_contains, twistor_fiber, twistor_project, HPoint};
use crate::xratio::Cp1;
use crate::{GeomError, Result};

const PLANE_TOL: f64 = 1e-8;

/// The pencil of lines through `point` inside `plane`, a projective line in Q⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullLine {
    pub point: CVector4,
    pub plane: ProjPlane,
}

impl NullLine {
    pub fn new(point: CVector4, plane: ProjPlane) -> Result<Self> {
        let point = point.normalized()?;
        if !plane.contains(&point, PLANE_TOL) {
            return Err(GeomError::Degenerate(
                "null line point not in its plane".into(),
            ));
        }
        Ok(NullLine { point, plane })
    }

    /// The null line through the common point of two incident lines, inside their plane.
    pub fn from_lines(a: &Bivector, b: &Bivector) -> Result<Self> {
        let p = line_meet(a, b)?;
        let (v1, w1) = line_factorize(a)?;
        let (v2, w2) = line_factorize(b)?;
        Self::new(p, ProjPlane::span(&[v1, w1, v2, w2], PLANE_TOL)?)
    }

    /// Two orthonormal bivectors spanning the pencil in ∧²ℂ⁴.
    pub fn generators(&self) -> [Bivector; 2] {
        let ws: Vec<Bivector> = self
            .plane
            .basis
            .iter()
            .map(|b| wedge(&self.point, b))
            .collect();
        let m = CMat::from_fn(6, 3, |r, c| ws[c].p[r]);
        let g = linalg::dominant_columns(&m, 2);
        let col = |k: usize| Bivector::from_slice(g.column(k).as_slice());
        [col(0), col(1)]
    }

    /// The pencil member t.z·g₀ + t.w·g₁.
    pub fn member(&self, t: Cp1) -> Bivector {
        let [g0, g1] = self.generators();
        g0 * t.z + g1 * t.w
    }

    /// Distance of a line from the pencil, as a relative residual in ∧²ℂ⁴.
    pub fn residual(&self, a: &Bivector) -> f64 {
        let Ok(u) = a.normalized() else { return 0.0 };
        let [g0, g1] = self.generators();
        let proj = g0 * g0.hdot(&u) + g1 * g1.hdot(&u);
        (u - proj).norm()
    }

    pub fn contains(&self, a: &Bivector, tol: f64) -> bool {
        self.residual(a) < tol
    }

    /// The fiber Π ∩ Πj carried by the plane.
    pub fn plane_fiber(&self) -> Result<Bivector> {
        meet_two_planes(&self.plane, &self.plane.j())
    }

    pub fn real_point(&self) -> Option<HPoint> {
        null_line_real_point(self)
    }

    /// Distance as (point, plane) pairs, up to normalization.
    pub fn dist(&self, o: &NullLine) -> f64 {
        projective_distance(&self.point.c, &o.point.c).max(self.plane.dist(&o.plane))
    }
}

/// The unique twistor fiber in the pencil, or `None` for a half-contact element.
///
/// Π meets Πj in a fiber, and the pencil holds that fiber iff its point lies on it,
/// that is iff point·j ∈ Π.
pub fn null_line_real_point(l: &NullLine) -> Option<HPoint> {
    if l.plane.contains(&l.point.j(), PLANE_TOL) {
        twistor_project(&l.point).ok()
    } else {
        None
    }
}

/// The contact element of spheres touching `sphere` at `p`: the pencil at fiber(p) ∩ sphere
/// inside span{fiber(p), sphere}.
pub fn contact_element(p: &HPoint, sphere: &Bivector) -> Result<NullLine> {
    if is_j_real(sphere, 1e-8) {
        return Err(GeomError::NotASphere);
    }
    if !line_contains(sphere, p, 1e-8) {
        return Err(GeomError::NotOnSphere);
    }
    let fib = twistor_fiber(p);
    let point = line_meet(sphere, &fib)?;
    let (s1, s2) = line_factorize(sphere)?;
    let v = p.lift();
    NullLine::new(point, ProjPlane::span(&[v, v.j(), s1, s2], PLANE_TOL)?)
}

/// The contact element at p with point v·z + vj·w on the fiber and plane span{fiber, u}.
pub fn contact_element_at(p: &HPoint, t: Cp1, u: &CVector4) -> Result<NullLine> {
    let v = p.lift();
    let point = v * t.z + v.j() * t.w;
    let plane = ProjPlane::span(&[v, v.j(), *u], PLANE_TOL).map_err(|_| GeomError::FiberInPlane)?;
    NullLine::new(point, plane)
}

/// The unique contact element at `p_next` sharing a sphere with `l`.
pub fn propagate_element(l: &NullLine, p_next: &HPoint) -> Result<NullLine> {
    propagate_with_sphere(l, p_next).map(|(e, _)| e)
}

/// [`propagate_element`] together with the shared sphere.
pub fn propagate_with_sphere(l: &NullLine, p_next: &HPoint) -> Result<(NullLine, Bivector)> {
    let fib = twistor_fiber(p_next);
    if l.plane.contains_line(&fib, PLANE_TOL)? {
        return Err(GeomError::FiberInPlane);
    }
    let y = meet_line(&l.plane, &fib)?;
    let shared = wedge(&l.point, &y);
    if shared.norm() < 1e-9 {
        return Err(GeomError::CoincidentPoints);
    }
    let v = p_next.lift();
    let plane = ProjPlane::span(&[v, v.j(), l.point], PLANE_TOL)?;
    Ok((NullLine::new(y, plane)?, shared.normalized()?))
}

/// The sphere common to two null lines with distinct points, with its incidence residual.
pub fn shared_sphere(a: &NullLine, b: &NullLine) -> Result<(Bivector, f64)> {
    let s = wedge(&a.point, &b.point);
    if s.norm() < 1e-9 {
        return Err(GeomError::CoincidentPoints);
    }
    let res = a.plane.residual(&b.point).max(b.plane.residual(&a.point));
    Ok((s.normalized()?, res))
}

/// A principal contact element net over a net of HP¹ points (stored as ℂ⁴ lifts).
#[derive(Debug, Clone, PartialEq)]
pub struct Pcen {
    pub base: LatticeNet,
    pub elements: BTreeMap<Vec<i64>, NullLine>,
}

impl Pcen {
    pub fn element(&self, idx: &[i64]) -> Result<&NullLine> {
        self.elements
            .get(idx)
            .ok_or_else(|| GeomError::MissingVertex(idx.iter().map(|&x| x as usize).collect()))
    }

    /// Largest shared-sphere residual over all lattice edges.
    pub fn adjacency_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (idx, e) in &self.elements {
            for d in 0..self.base.dim {
                let mut n = idx.clone();
                n[d] += 1;
                if let Some(f) = self.elements.get(&n) {
                    worst = worst.max(shared_sphere(e, f)?.1);
                }
            }
        }
        Ok(worst)
    }

    /// Distance between the elements at φ₁₂ induced from φ₁ and from φ₂.
    pub fn face_closure(&self, face: &Face) -> Result<f64> {
        let c = face.corners();
        let p12 = self.base.hpoint(&c[2])?;
        let via1 = propagate_element(self.element(&c[1])?, &p12)?;
        let via2 = propagate_element(self.element(&c[3])?, &p12)?;
        Ok(via1.dist(&via2))
    }

    pub fn max_closure(&self) -> Result<f64> {
        self.base
            .faces()
            .iter()
            .try_fold(0.0f64, |m, f| Ok(m.max(self.face_closure(f)?)))
    }

    /// Largest distance between an element's real point and its base point; infinite if one lacks a real point.
    pub fn real_point_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (idx, e) in &self.elements {
            let d = match e.real_point() {
                Some(p) => p.dist(&self.base.hpoint(idx)?),
                None => f64::INFINITY,
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

fn check_base(base: &LatticeNet) -> Result<()> {
    if base.dim != 2 || base.width != 4 {
        return Err(GeomError::Degenerate(
            "contact element nets need a 2D net of ℂ⁴ lifts".into(),
        ));
    }
    Ok(())
}

/// Propagates `initial` (an element over the lower corner) along the first row, then up
/// every column. For circular bases the element at φ₁₂ does not depend on the path.
pub fn pcen_from_circular(base: &LatticeNet, initial: &NullLine) -> Result<Pcen> {
    check_base(base)?;
    let (lo, hi) = (&base.lo, &base.hi);
    let corner = base.hpoint(lo)?;
    match initial.real_point() {
        Some(p) if p.dist(&corner) < 1e-8 => {}
        _ => {
            return Err(GeomError::Degenerate(
                "initial element does not sit over the base corner".into(),
            ))
        }
    }
    let mut elements = BTreeMap::new();
    elements.insert(lo.clone(), *initial);
    for k in lo[0] + 1..=hi[0] {
        let prev = elements[&vec![k - 1, lo[1]]];
        elements.insert(
            vec![k, lo[1]],
            propagate_element(&prev, &base.hpoint(&[k, lo[1]])?)?,
        );
    }
    for k in lo[0]..=hi[0] {
        for m in lo[1] + 1..=hi[1] {
            let prev = elements[&vec![k, m - 1]];
            elements.insert(
                vec![k, m],
                propagate_element(&prev, &base.hpoint(&[k, m])?)?,
            );
        }
    }
    Ok(Pcen {
        base: base.clone(),
        elements,
    })
}

/// Which of the two alternating choices sits over the lower corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// {[φ], span{fiber(φ), Sj}} at even vertices, {[φj], span{fiber(φ), S}} at odd ones.
    Left,
    /// The same with the two choices exchanged.
    Right,
}

/// The alternating contact element net over a net lying on the sphere S.
///
/// With φ the lift of a base point inside the line S, even vertices carry the pencil at [φ]
/// in the plane through Sj and odd vertices the pencil at [φj] in the plane through S, so that
/// neighbours share the sphere [φ ∧ φ′j].
pub fn pcen_from_complex_cr(s: &Bivector, base: &LatticeNet, side: Side) -> Result<Pcen> {
    check_base(base)?;
    if is_j_real(s, 1e-8) {
        return Err(GeomError::NotASphere);
    }
    let (s1, s2) = line_factorize(s)?;
    let mut elements = BTreeMap::new();
    for idx in base.box_points() {
        let p = base.hpoint(&idx)?;
        if !line_contains(s, &p, 1e-8) {
            return Err(GeomError::NotOnSphere);
        }
        let phi = line_meet(s, &twistor_fiber(&p))?;
        let even = (idx.iter().sum::<i64>() - base.lo.iter().sum::<i64>()) % 2 == 0;
        let through_sj = even == (side == Side::Left);
        let (point, extra) = if through_sj {
            (phi, [s1.j(), s2.j()])
        } else {
            (phi.j(), [s1, s2])
        };
        let plane = ProjPlane::span(&[phi, phi.j(), extra[0], extra[1]], PLANE_TOL)?;
        elements.insert(idx, NullLine::new(point, plane)?);
    }
    Ok(Pcen {
        base: base.clone(),
        elements,
    })
}

/// A base net of ℂ⁴ lifts from a CP¹ net through the coordinate z ↦ [pz + q] of a sphere.
pub fn lift_cp1_net(p: &CVector4, q: &CVector4, net: &LatticeNet) -> Result<LatticeNet> {
    let mut out = LatticeNet::new(net.dim, 4, net.lo.clone(), net.hi.clone())?;
    for (idx, _) in net.iter() {
        let z = net.cp1(idx)?;
        let x: CVector4 = *p * z.z + *q * z.w;
        out.insert(idx.clone(), &x.c)?;
    }
    Ok(out)
}

/// Samples `n` members of the pencil at parameters [cos θ : e^{iθ} sin θ].
pub fn pencil_samples(l: &NullLine, n: usize) -> Vec<Bivector> {
    (0..n)
        .map(|k| {
            let t = 0.3 + k as f64 * std::f64::consts::PI / n as f64;
            l.member(Cp1::new(
                Complex64::new(t.cos(), 0.0),
                Complex64::from_polar(t.sin(), t),
            ))
        })
        .collect()
}
