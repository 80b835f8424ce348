//! `check`: per-face residual reports for every document kind.

use num_complex::Complex64;
use serde::Serialize;

use twistor_core::contact::Pcen;
use twistor_core::linalg::{sv_ratio, CMat};
use twistor_core::nets::{bianchi_check, face_planarity, is_conic_net, Face};
use twistor_core::twistor::twistor_fiber;
use twistor_core::xratio::complex_cr;

use crate::doc::{Kind, NetDocument};
use crate::{degenerate, read_text, CheckArgs, CliError, CliResult, Globals, Report};

/// One line of the report.
#[derive(Debug, Serialize)]
pub struct FaceRow {
    pub base: Vec<i64>,
    pub dirs: [usize; 2],
    pub residual: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub kind: Kind,
    pub report: &'static str,
    pub tol: f64,
    pub faces: Vec<FaceRow>,
    pub max_residual: f64,
    pub failures: usize,
    /// Outcome of the Bianchi permutability test for a 4D hypercube, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bianchi: Option<bool>,
}

pub fn run(a: &CheckArgs, g: Globals) -> CliResult<()> {
    let doc = NetDocument::from_json(&read_text(&a.input)?)?;
    let report = build(&doc, a.report, g.tol)?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print!("{}", render(&report));
    }
    if report.failures > 0 || report.bianchi == Some(false) {
        return Err(CliError::Verification(format!(
            "{} of {} faces exceed tolerance {:e}",
            report.failures,
            report.faces.len(),
            report.tol
        )));
    }
    Ok(())
}

fn resolve(kind: Kind, r: Report) -> CliResult<Report> {
    let ok = match (kind, r) {
        (_, Report::Auto) => {
            return Ok(match kind {
                Kind::Cp1 => Report::CrossRatio,
                Kind::Hp1 => Report::Circular,
                Kind::Q4 => Report::Planarity,
                Kind::Pcen => Report::Closure,
            })
        }
        (Kind::Cp1, Report::CrossRatio) => true,
        (Kind::Hp1, Report::Circular) => true,
        (Kind::Q4, Report::Planarity | Report::Conic) => true,
        (Kind::Pcen, Report::Closure | Report::Circular) => true,
        _ => false,
    };
    if ok {
        Ok(r)
    } else {
        Err(CliError::Usage(format!(
            "report {} does not apply to {kind:?} documents",
            name(r)
        )))
    }
}

fn name(r: Report) -> &'static str {
    match r {
        Report::Auto => "auto",
        Report::Planarity => "planarity",
        Report::Conic => "conic",
        Report::Circular => "circular",
        Report::CrossRatio => "cross-ratio",
        Report::Closure => "closure",
    }
}

/// Computes the report without printing it.
pub fn build(doc: &NetDocument, r: Report, tol: f64) -> CliResult<CheckReport> {
    let r = resolve(doc.kind, r)?;
    let net = &doc.net;
    if net.dim < 2 {
        return Err(CliError::Usage(
            "check needs a net of dimension at least 2".into(),
        ));
    }
    let row = |f: &Face, residual: f64, note: Option<String>| FaceRow {
        base: f.base.clone(),
        dirs: [f.i, f.j],
        residual,
        ok: residual <= tol,
        note,
    };
    let faces = net.faces();
    let mut rows = Vec::with_capacity(faces.len());
    match r {
        Report::CrossRatio => {
            let mut target = doc.metadata.lambda();
            for f in &faces {
                let c = f.corners();
                let z = |i: usize| net.cp1(&c[i]).map_err(degenerate("vertex"));
                let cr = complex_cr(z(1)?, z(0)?, z(3)?, z(2)?)
                    .map_err(degenerate(format!("face {:?}", f.base)))?;
                let t = *target.get_or_insert(cr);
                rows.push(row(
                    f,
                    (cr - t).norm() / (1.0 + t.norm()),
                    Some(format!("cr = {}", fmt_c(cr))),
                ));
            }
        }
        Report::Circular => {
            for f in &faces {
                let c = f.corners();
                let mut m = CMat::zeros(4, 6);
                for (r, idx) in c.iter().enumerate() {
                    let fib = twistor_fiber(&net.hpoint(idx).map_err(degenerate("vertex"))?);
                    for k in 0..6 {
                        m[(r, k)] = fib.p[k];
                    }
                }
                rows.push(row(f, sv_ratio(&m, 4), None));
            }
        }
        Report::Planarity => {
            for f in &faces {
                let p = face_planarity(net, f).map_err(degenerate(format!("face {:?}", f.base)))?;
                rows.push(row(f, p, None));
            }
        }
        Report::Conic => {
            for fc in is_conic_net(net).map_err(degenerate("conic net"))? {
                let mut fr = row(
                    &fc.face,
                    fc.planarity,
                    Some(
                        if fc.irreducible {
                            "irreducible"
                        } else {
                            "reducible"
                        }
                        .into(),
                    ),
                );
                fr.ok &= fc.irreducible;
                rows.push(fr);
            }
        }
        Report::Closure => {
            let pcen = Pcen {
                base: net.clone(),
                elements: doc.elements.clone(),
            };
            for f in &faces {
                let res = pcen
                    .face_closure(f)
                    .map_err(degenerate(format!("face {:?}", f.base)))?;
                rows.push(row(f, res, None));
            }
        }
        Report::Auto => unreachable!("resolved above"),
    }
    let bianchi = (doc.kind == Kind::Q4
        && net.dim == 4
        && net.lo.iter().all(|&x| x == 0)
        && net.hi.iter().all(|&x| x == 1))
    .then(|| {
        let verts: Vec<Vec<Complex64>> = (0..16usize)
            .map(|b| {
                let idx: Vec<i64> = (0..4).map(|d| ((b >> d) & 1) as i64).collect();
                net.get(&idx).expect("full box").to_vec()
            })
            .collect();
        bianchi_check(&verts, tol)
    });
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failures = rows.iter().filter(|r| !r.ok).count();
    Ok(CheckReport {
        kind: doc.kind,
        report: name(r),
        tol,
        faces: rows,
        max_residual,
        failures,
        bianchi,
    })
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn render(r: &CheckReport) -> String {
    let mut s = format!(
        "# {:?} net, report {}, tolerance {:e}\n",
        r.kind, r.report, r.tol
    );
    for f in &r.faces {
        s.push_str(&format!(
            "face {:?} dirs ({}, {})  residual {:.3e}  {}",
            f.base,
            f.dirs[0],
            f.dirs[1],
            f.residual,
            if f.ok { "ok" } else { "FAIL" }
        ));
        if let Some(n) = &f.note {
            s.push_str(&format!("  {n}"));
        }
        s.push('\n');
    }
    if let Some(b) = r.bianchi {
        s.push_str(&format!("bianchi {}\n", if b { "ok" } else { "FAIL" }));
    }
    s.push_str(&format!(
        "{} faces, max residual {:.3e}, {} failing\n",
        r.faces.len(),
        r.max_residual,
        r.failures
    ));
    s
}
