//! `export`: OBJ meshes of nets and spheres, or canonical JSON.
//!
//! HP¹ points go through an affine chart of ℝ⁴ = ℍ and lose one coordinate for
//! display. Two-spheres of a Q⁴ net become UV-sphere meshes of the round sphere
//! they are in the chart.

use std::fmt::Write as _;

use num_complex::Complex64;

use twistor_core::nets::cp1_to_hpoint;
use twistor_core::proj4::{line_factorize, Bivector};
use twistor_core::quat::Quaternion;
use twistor_core::twistor::{fiber_point, is_j_real, line_contains, twistor_project, HPoint};

use crate::doc::{Kind, NetDocument};
use crate::{
    read_text, write_output, Axis, Chart, CliError, CliResult, ExportArgs, Format, Globals,
};

/// An affine chart of HP¹ followed by a coordinate projection ℝ⁴ → ℝ³.
#[derive(Debug, Clone, Copy)]
pub struct View {
    pub chart: Chart,
    pub center: Quaternion,
    pub drop: Axis,
    pub tol: f64,
}

impl View {
    /// Chart coordinates of p, or `None` at the chart's point at ∞.
    pub fn chart_point(&self, p: &HPoint) -> Option<Quaternion> {
        let num = p.a - self.center * p.b;
        let n = (num.norm_sqr() + p.b.norm_sqr()).sqrt();
        let (top, bottom) = match self.chart {
            Chart::Affine => (num, p.b),
            Chart::Inverted => (p.b, num),
        };
        (bottom.norm() > self.tol * n).then(|| top * bottom.inv())
    }

    /// The point of HP¹ sent to ∞ by the chart.
    pub fn infinity(&self) -> HPoint {
        match self.chart {
            Chart::Affine => HPoint::infinity(),
            Chart::Inverted => HPoint::from_affine(self.center),
        }
    }

    pub fn display(&self, q: Quaternion) -> [f64; 3] {
        let a = q.to_array();
        let keep: [usize; 3] = match self.drop {
            Axis::W => [1, 2, 3],
            Axis::X => [0, 2, 3],
            Axis::Y => [0, 1, 3],
            Axis::Z => [0, 1, 2],
        };
        keep.map(|k| a[k])
    }
}

/// Center, radius and an orthonormal frame of the 3-space of a round two-sphere in ℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSphere {
    pub center: [f64; 4],
    pub radius: f64,
    pub frame: [[f64; 4]; 3],
}

fn sub(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

fn axpy(y: [f64; 4], s: f64, x: [f64; 4]) -> [f64; 4] {
    [
        y[0] + s * x[0],
        y[1] + s * x[1],
        y[2] + s * x[2],
        y[3] + s * x[3],
    ]
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The round sphere of a non-j-real line, or `None` if it passes through the chart's ∞.
///
/// Four points of the line at parameters 0, 1, i, ∞ are not concircular, so they
/// span the sphere's 3-space and fix its circumcenter there.
pub fn round_sphere(alpha: &Bivector, view: &View) -> CliResult<Option<RoundSphere>> {
    if line_contains(alpha, &view.infinity(), 1e-9) {
        return Ok(None);
    }
    let bad = |e: twistor_core::GeomError| CliError::Degenerate(format!("sphere: {e}"));
    let (v, w) = line_factorize(alpha).map_err(bad)?;
    let i = Complex64::new(0.0, 1.0);
    let samples = [v, v + w, v + w * i, w];
    let mut p = [[0.0; 4]; 4];
    for (k, x) in samples.iter().enumerate() {
        let h = twistor_project(x).map_err(bad)?;
        p[k] = view
            .chart_point(&h)
            .ok_or_else(|| CliError::Degenerate("sphere sample at ∞".into()))?
            .to_array();
    }
    let mut frame = [[0.0; 4]; 3];
    let scale = (1..4)
        .map(|k| dot(sub(p[k], p[0]), sub(p[k], p[0])).sqrt())
        .fold(0.0, f64::max);
    for k in 0..3 {
        let mut d = sub(p[k + 1], p[0]);
        for e in frame.iter().take(k) {
            d = axpy(d, -dot(d, *e), *e);
        }
        let n = dot(d, d).sqrt();
        if n <= 1e-9 * scale {
            return Err(CliError::Degenerate("sphere samples are coplanar".into()));
        }
        frame[k] = d.map(|x| x / n);
    }
    // circumcenter u in frame coordinates: 2 xₖ·u = |xₖ|² with x₀ = 0
    let x: Vec<[f64; 3]> = (1..4)
        .map(|k| {
            let d = sub(p[k], p[0]);
            [dot(d, frame[0]), dot(d, frame[1]), dot(d, frame[2])]
        })
        .collect();
    let a = [
        x[0].map(|t| 2.0 * t),
        x[1].map(|t| 2.0 * t),
        x[2].map(|t| 2.0 * t),
    ];
    let rhs: Vec<f64> = x.iter().map(|r| r.iter().map(|t| t * t).sum()).collect();
    let d = det3(a);
    let mut u = [0.0; 3];
    for c in 0..3 {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = rhs[r];
        }
        u[c] = det3(m) / d;
    }
    let mut center = p[0];
    for c in 0..3 {
        center = axpy(center, u[c], frame[c]);
    }
    let radius = u.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(Some(RoundSphere {
        center,
        radius,
        frame,
    }))
}

/// Vertex positions of a UV sphere: north pole, `segments/2 − 1` rings, south pole.
fn uv_vertices(s: &RoundSphere, segments: usize) -> Vec<[f64; 4]> {
    let rings = segments / 2;
    let mut out = Vec::new();
    for r in 0..=rings {
        let theta = std::f64::consts::PI * r as f64 / rings as f64;
        let count = if r == 0 || r == rings { 1 } else { segments };
        for k in 0..count {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
            let mut p = axpy(s.center, s.radius * theta.cos(), s.frame[2]);
            p = axpy(p, s.radius * theta.sin() * phi.cos(), s.frame[0]);
            p = axpy(p, s.radius * theta.sin() * phi.sin(), s.frame[1]);
            out.push(p);
        }
    }
    out
}

/// Faces of the UV sphere as 0-based vertex lists.
fn uv_faces(segments: usize) -> Vec<Vec<usize>> {
    let rings = segments / 2;
    let ring = |r: usize, k: usize| 1 + (r - 1) * segments + k % segments;
    let south = 1 + (rings - 1) * segments;
    let mut out = Vec::new();
    for k in 0..segments {
        out.push(vec![0, ring(1, k), ring(1, k + 1)]);
    }
    for r in 1..rings - 1 {
        for k in 0..segments {
            out.push(vec![
                ring(r, k),
                ring(r + 1, k),
                ring(r + 1, k + 1),
                ring(r, k + 1),
            ]);
        }
    }
    for k in 0..segments {
        out.push(vec![ring(rings - 1, k), south, ring(rings - 1, k + 1)]);
    }
    out
}

fn fmt_v(out: &mut String, v: [f64; 3]) {
    writeln!(out, "v {} {} {}", v[0], v[1], v[2]).unwrap();
}

/// Renders a document as OBJ text; warnings for skipped entries go to `warnings`.
pub fn to_obj(
    doc: &NetDocument,
    view: &View,
    segments: usize,
    warnings: &mut Vec<String>,
) -> CliResult<String> {
    let net = &doc.net;
    let mut out = String::new();
    writeln!(out, "# twistor export: {:?} net, dim {}", doc.kind, net.dim).unwrap();
    let mut vertex_of = std::collections::BTreeMap::new();
    let mut spheres = Vec::new();
    let mut count = 0usize;
    for (idx, _) in net.iter() {
        let point = match doc.kind {
            Kind::Cp1 => {
                let z = net
                    .cp1(idx)
                    .map_err(|e| CliError::Degenerate(e.to_string()))?;
                view.chart_point(&cp1_to_hpoint(z)).map(|q| [q.w, q.x, 0.0])
            }
            Kind::Hp1 | Kind::Pcen => {
                let p = net
                    .hpoint(idx)
                    .map_err(|e| CliError::Degenerate(e.to_string()))?;
                view.chart_point(&p).map(|q| view.display(q))
            }
            Kind::Q4 => {
                let a = net
                    .bivector(idx)
                    .map_err(|e| CliError::Degenerate(e.to_string()))?;
                if !is_j_real(&a, 1e-8) {
                    spheres.push((idx.clone(), a));
                    continue;
                }
                let p = fiber_point(&a).map_err(|e| CliError::Degenerate(e.to_string()))?;
                view.chart_point(&p).map(|q| view.display(q))
            }
        };
        match point {
            Some(v) => {
                fmt_v(&mut out, v);
                count += 1;
                vertex_of.insert(idx.clone(), count);
            }
            None => warnings.push(format!("vertex {idx:?} is at ∞ in the chart; skipped")),
        }
    }
    if net.dim == 1 {
        for (idx, &a) in &vertex_of {
            if let Some(&b) = vertex_of.get(&vec![idx[0] + 1]) {
                writeln!(out, "l {a} {b}").unwrap();
            }
        }
    } else {
        for f in net.faces() {
            let c = f.corners();
            let ids: Option<Vec<usize>> = c.iter().map(|i| vertex_of.get(i).copied()).collect();
            if let Some(ids) = ids {
                writeln!(out, "f {} {} {} {}", ids[0], ids[1], ids[2], ids[3]).unwrap();
            }
        }
    }
    for (idx, a) in spheres {
        let Some(s) = round_sphere(&a, view)? else {
            warnings.push(format!(
                "sphere {idx:?} passes through ∞ in the chart; skipped"
            ));
            continue;
        };
        let label: Vec<String> = idx.iter().map(|x| x.to_string()).collect();
        writeln!(out, "o sphere_{}", label.join("_")).unwrap();
        let c = s.center;
        writeln!(
            out,
            "# center {} {} {} {} radius {}",
            c[0], c[1], c[2], c[3], s.radius
        )
        .unwrap();
        let base = count;
        for p in uv_vertices(&s, segments) {
            fmt_v(&mut out, view.display(Quaternion::from_array(p)));
            count += 1;
        }
        for f in uv_faces(segments) {
            let ids: Vec<String> = f.iter().map(|k| (base + k + 1).to_string()).collect();
            writeln!(out, "f {}", ids.join(" ")).unwrap();
        }
    }
    Ok(out)
}

fn parse_quaternion(s: &str) -> CliResult<Quaternion> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--center: cannot parse {s:?}")))?;
    match parts[..] {
        [w, x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Quaternion::new(w, x, y, z)),
        _ => Err(CliError::Usage(
            "--center needs four numbers w,x,y,z".into(),
        )),
    }
}

pub fn run(a: &ExportArgs, g: Globals) -> CliResult<()> {
    let doc = NetDocument::from_json(&read_text(&a.input)?)?;
    let text = match a.format {
        Format::Json => doc.to_json(),
        Format::Obj => {
            if a.segments < 4 || !a.segments.is_multiple_of(2) {
                return Err(CliError::Usage(
                    "--segments must be even and at least 4".into(),
                ));
            }
            let view = View {
                chart: a.chart,
                center: parse_quaternion(&a.center)?,
                drop: a.drop,
                tol: g.tol,
            };
            let mut warnings = Vec::new();
            let text = to_obj(&doc, &view, a.segments, &mut warnings)?;
            for w in warnings {
                eprintln!("twistor: warning: {w}");
            }
            text
        }
    };
    write_output(a.output.as_deref(), &text)
}
