//! Single-cell and report commands: `hexahedron`, `holonomy`, `lie-report`, `sample`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use twistor_core::lie::{decompose_form, lie_signature_report, QuatHermitianForm};
use twistor_core::nets::{
    face_planarity, hexahedron_complete, holonomy as holonomy_of, Face, LatticeNet,
};
use twistor_core::quat::Quaternion;
use twistor_core::twistor::HPoint;
use twistor_core::xratio::Cp1;

use crate::doc::{Kind, Metadata, NetDocument};
use crate::{
    degenerate, parse_complex, read_text, write_output, CliError, CliResult, Globals,
    HexahedronArgs, HolonomyArgs, LieArgs, SampleArgs, SampleKind,
};

const CUBE: [[i64; 3]; 7] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
];

pub fn hexahedron(a: &HexahedronArgs, g: Globals) -> CliResult<()> {
    let mut doc = NetDocument::from_json_partial(&read_text(&a.input)?)?;
    if !matches!(doc.kind, Kind::Hp1 | Kind::Q4) {
        return Err(CliError::Usage(
            "hexahedron needs an hp1 or q4 document".into(),
        ));
    }
    let net = &doc.net;
    if net.dim != 3 || net.lo != [0, 0, 0] || net.hi != [1, 1, 1] {
        return Err(CliError::Usage(
            "hexahedron needs dim 3 on the box [0,1]³".into(),
        ));
    }
    let pts: Vec<&[Complex64]> = CUBE
        .iter()
        .map(|i| {
            net.get(i)
                .map_err(|_| CliError::Usage(format!("entries: missing vertex {i:?}")))
        })
        .collect::<CliResult<_>>()?;
    let x = hexahedron_complete(pts[0], pts[1], pts[2], pts[3], pts[4], pts[5], pts[6])
        .map_err(degenerate("hexahedron"))?;
    doc.net
        .insert(vec![1, 1, 1], &x)
        .map_err(degenerate("hexahedron"))?;
    let mut summary = String::from("# faces through (1, 1, 1)\n");
    let mut worst: f64 = 0.0;
    for (base, i, j) in [([1, 0, 0], 1, 2), ([0, 1, 0], 0, 2), ([0, 0, 1], 0, 1)] {
        let f = Face::new(base.to_vec(), i, j);
        let r = face_planarity(&doc.net, &f).map_err(degenerate("face"))?;
        worst = worst.max(r);
        summary.push_str(&format!(
            "face {:?} dirs ({i}, {j})  planarity {r:.3e}\n",
            f.base
        ));
    }
    let text = doc.to_json();
    match &a.output {
        Some(_) => {
            write_output(a.output.as_deref(), &text)?;
            print!("{summary}");
        }
        None => {
            print!("{text}");
            eprint!("{summary}");
        }
    }
    if worst > g.tol {
        return Err(CliError::Verification(format!(
            "face planarity {worst:.3e} exceeds {:e}",
            g.tol
        )));
    }
    Ok(())
}

fn c_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.9}{:+.9}i", z.re, z.im)
}

pub fn holonomy(a: &HolonomyArgs, g: Globals) -> CliResult<()> {
    let lambda = parse_complex(&a.lambda)?;
    let doc = NetDocument::from_json(&read_text(&a.curve)?)?;
    if doc.kind != Kind::Cp1 || doc.net.dim != 1 {
        return Err(CliError::Usage("holonomy needs a cp1 curve (dim 1)".into()));
    }
    let curve: Vec<Cp1> = doc
        .net
        .iter()
        .map(|(i, _)| doc.net.cp1(i).map_err(degenerate("curve")))
        .collect::<CliResult<_>>()?;
    let h = holonomy_of(&curve, lambda).map_err(degenerate("holonomy"))?;
    let m = h.matrix;
    let closed_twice = curve.len() > 1 && curve[0].dist(curve.last().expect("nonempty")) < 1e-12;
    let n = curve.len() - usize::from(closed_twice);
    let expected = (Complex64::new(1.0, 0.0) - lambda).powu(n as u32);
    if a.json {
        let out = json!({
            "lambda": c_json(lambda),
            "matrix": [[c_json(m[(0, 0)]), c_json(m[(0, 1)])], [c_json(m[(1, 0)]), c_json(m[(1, 1)])]],
            "det": c_json(h.det),
            "det_expected": c_json(expected),
            "eigenvalues": h.eigenvalues.iter().map(|&z| c_json(z)).collect::<Vec<_>>(),
            "eigenlines": h.eigenlines.iter().map(|l| json!([c_json(l.z), c_json(l.w)])).collect::<Vec<_>>(),
            "parabolic": h.parabolic,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializes")
        );
    } else {
        println!("holonomy, λ = {}", fmt_c(lambda));
        println!("  [{}  {}]", fmt_c(m[(0, 0)]), fmt_c(m[(0, 1)]));
        println!("  [{}  {}]", fmt_c(m[(1, 0)]), fmt_c(m[(1, 1)]));
        println!("det {}  (1 − λ)ⁿ = {}", fmt_c(h.det), fmt_c(expected));
        for (mu, l) in h.eigenvalues.iter().zip(&h.eigenlines) {
            println!(
                "eigenvalue {}  eigenline [{} : {}]",
                fmt_c(*mu),
                fmt_c(l.z),
                fmt_c(l.w)
            );
        }
        if h.parabolic {
            println!("parabolic");
        }
    }
    if (h.det - expected).norm() > g.tol * (1.0 + expected.norm()) {
        return Err(CliError::Verification(
            "holonomy determinant differs from (1 − λ)ⁿ".into(),
        ));
    }
    Ok(())
}

pub fn lie_report(a: &LieArgs) -> CliResult<()> {
    let form = decompose_form(&QuatHermitianForm::default()).map_err(degenerate("form"))?;
    let r = lie_signature_report(&form).map_err(degenerate("signature"))?;
    if a.json {
        let out = json!({
            "full": [r.full.0, r.full.1],
            "omega_restricted": [r.omega_restricted.0, r.omega_restricted.1],
            "unphased": [r.unphased.0, r.unphased.1],
            "fixed_residual": r.fixed_residual,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializes")
        );
    } else {
        println!("Lie quadric, form [[0, 1], [1, 0]]");
        println!(
            "signature on the real basis        ({}, {})",
            r.full.0, r.full.1
        );
        println!(
            "signature on the real part of ω°   ({}, {})",
            r.omega_restricted.0, r.omega_restricted.1
        );
        println!(
            "signature with unit phases         ({}, {})",
            r.unphased.0, r.unphased.1
        );
        println!(
            "max |ρ(B) − B| on the basis        {:.3e}",
            r.fixed_residual
        );
    }
    if r.full != (2, 4) || r.omega_restricted != (1, 4) {
        return Err(CliError::Verification("unexpected signatures".into()));
    }
    Ok(())
}

pub fn sample(a: &SampleArgs, g: Globals) -> CliResult<()> {
    let min = if a.closed { 3 } else { 2 };
    if a.n < min {
        return Err(CliError::Usage(format!("--n must be at least {min}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut u = || rng.gen_range(-1.0..1.0);
    let n = a.n;
    let (kind, width) = match a.kind {
        SampleKind::Cp1 => (Kind::Cp1, 2),
        SampleKind::Hp1 => (Kind::Hp1, 4),
    };
    let mut net =
        LatticeNet::new(1, width, vec![0], vec![n as i64 - 1]).map_err(degenerate("sample"))?;
    for k in 0..n {
        let z = if a.closed {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.2 * u()) / n as f64;
            Complex64::from_polar(1.0 + 0.2 * u(), t)
        } else {
            Complex64::new(k as f64 + 0.2 * u(), 0.2 * u())
        };
        let v = match a.kind {
            SampleKind::Cp1 => vec![z, Complex64::new(1.0, 0.0)],
            SampleKind::Hp1 => {
                let q = Quaternion::new(z.re, z.im, 0.2 * u(), 0.2 * u());
                HPoint::from_affine(q).lift().c.to_vec()
            }
        };
        net.insert(vec![k as i64], &v)
            .map_err(degenerate("sample"))?;
    }
    let doc = NetDocument::new(kind, net, Metadata::default());
    write_output(a.output.as_deref(), &doc.to_json())
}
