//! `evolve`: real or complex cross-ratio evolution of a curve into a 2D net.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistor_core::nets::{circular_step, cp1_to_hpoint, lift_to_qs2, LatticeNet, SphereChart};
use twistor_core::quat::Quaternion;
use twistor_core::twistor::{twistor_fiber, HPoint};
use twistor_core::xratio::{complex_fourth_point, Cp1};

use crate::doc::{bivector_reals, Kind, Metadata, NetDocument};
use crate::{
    degenerate, parse_complex, read_text, write_output, CliError, CliResult, EvolveArgs, Globals,
    Mode,
};

pub fn run(a: &EvolveArgs, g: Globals) -> CliResult<()> {
    let lambda = parse_complex(&a.lambda)?;
    let curve = load_curve(&read_text(&a.curve)?, "curve")?;
    if curve.net.len() < 2 {
        return Err(CliError::Usage("curve needs at least two points".into()));
    }
    let transversal = match &a.transversal {
        Some(p) => Some(load_curve(&read_text(p)?, "transversal")?),
        None => None,
    };
    let rows = match (&transversal, a.rows) {
        (Some(t), _) => t.net.len(),
        (None, Some(r)) => r,
        (None, None) => curve.net.len(),
    };
    if rows < 1 {
        return Err(CliError::Usage("--rows must be at least 1".into()));
    }
    let mut metadata = Metadata {
        lambda: Some([lambda.re, lambda.im]),
        tol: Some(g.tol),
        ..Metadata::default()
    };
    let doc = match a.mode {
        Mode::Circular => {
            if lambda.im.abs() > g.tol * (1.0 + lambda.norm()) {
                return Err(CliError::Usage("circular mode needs a real λ".into()));
            }
            metadata.mode = Some("circular".into());
            let c = hpoints(&curve)?;
            let t = match &transversal {
                Some(t) => hpoints(t)?,
                None => default_transversal_h(&c, rows, g.seed)?,
            };
            let net = circular(&c, &t, lambda.re, g.tol)?;
            if a.lift {
                let mut q4 = LatticeNet::new(2, 6, net.lo.clone(), net.hi.clone())
                    .map_err(degenerate("lift"))?;
                for (idx, _) in net.iter() {
                    let p = net.hpoint(idx).map_err(degenerate("lift"))?;
                    q4.insert(idx.clone(), &twistor_fiber(&p).p)
                        .map_err(degenerate("lift"))?;
                }
                NetDocument::new(Kind::Q4, q4, metadata)
            } else {
                NetDocument::new(Kind::Hp1, net, metadata)
            }
        }
        Mode::Complex => {
            metadata.mode = Some("complex".into());
            let c = cp1s(&curve)?;
            let t = match &transversal {
                Some(t) => cp1s(t)?,
                None => default_transversal_c(&c, rows, g.seed),
            };
            let net = complex(&c, &t, lambda, g.tol)?;
            if a.lift {
                let chart = SphereChart::standard();
                let q4 = lift_to_qs2(&chart, &net).map_err(degenerate("lift to Q²_S"))?;
                metadata.sphere = Some(bivector_reals(&chart.s));
                NetDocument::new(Kind::Q4, q4, metadata)
            } else {
                NetDocument::new(Kind::Cp1, net, metadata)
            }
        }
    };
    write_output(a.output.as_deref(), &doc.to_json())
}

fn load_curve(text: &str, what: &str) -> CliResult<NetDocument> {
    let doc = NetDocument::from_json(text).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
        other => other,
    })?;
    if doc.net.dim != 1 {
        return Err(CliError::Usage(format!(
            "{what}: expected a curve (dim 1), found dim {}",
            doc.net.dim
        )));
    }
    if doc.net.is_empty() {
        return Err(CliError::Usage(format!("{what}: empty curve")));
    }
    Ok(doc)
}

fn hpoints(doc: &NetDocument) -> CliResult<Vec<HPoint>> {
    doc.net
        .iter()
        .map(|(idx, _)| match doc.kind {
            Kind::Hp1 => doc.net.hpoint(idx).map_err(degenerate("curve")),
            Kind::Cp1 => Ok(cp1_to_hpoint(
                doc.net.cp1(idx).map_err(degenerate("curve"))?,
            )),
            _ => Err(CliError::Usage(
                "circular mode needs an hp1 or cp1 curve".into(),
            )),
        })
        .collect()
}

fn cp1s(doc: &NetDocument) -> CliResult<Vec<Cp1>> {
    if doc.kind != Kind::Cp1 {
        return Err(CliError::Usage("complex mode needs a cp1 curve".into()));
    }
    doc.net
        .iter()
        .map(|(idx, _)| doc.net.cp1(idx).map_err(degenerate("curve")))
        .collect()
}

/// A perturbed straight line from c₀ in a direction transverse to the first edge.
fn default_transversal_h(c: &[HPoint], rows: usize, seed: u64) -> CliResult<Vec<HPoint>> {
    let finite = |p: &HPoint| {
        p.affine()
            .ok_or_else(|| CliError::Usage("curve starts at ∞; give --transversal".into()))
    };
    let (c0, c1) = (finite(&c[0])?, finite(&c[1])?);
    let edge = c1 - c0;
    let h = edge.norm();
    let dir = if (edge.normalized() * Quaternion::J).re().abs() < 0.9 {
        Quaternion::J
    } else {
        Quaternion::K
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![c[0]];
    for m in 1..rows {
        let noise = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        out.push(HPoint::from_affine(
            c0 + (dir.scale(m as f64) + noise.scale(0.1)).scale(h),
        ));
    }
    Ok(out)
}

/// A perturbed straight line from c₀ perpendicular to the first edge.
fn default_transversal_c(c: &[Cp1], rows: usize, seed: u64) -> Vec<Cp1> {
    let (c0, c1) = match (c[0].value(), c[1].value()) {
        (Some(a), Some(b)) => (a, b),
        _ => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    };
    let step = (c1 - c0) * Complex64::new(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![c[0]];
    for m in 1..rows {
        let noise = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out.push(Cp1::finite(c0 + step * (m as f64 + 0.1 * noise)));
    }
    out
}

fn check_start(same: bool) -> CliResult<()> {
    if same {
        Ok(())
    } else {
        Err(CliError::Usage(
            "curve and transversal must share their first point".into(),
        ))
    }
}

/// Row-by-row real cross-ratio evolution; failures name the face (k, m).
fn circular(curve: &[HPoint], trans: &[HPoint], lambda: f64, tol: f64) -> CliResult<LatticeNet> {
    check_start(curve[0].dist(&trans[0]) < tol.max(1e-12))?;
    let (nk, nm) = (curve.len() - 1, trans.len() - 1);
    let mut net =
        LatticeNet::new(2, 4, vec![0, 0], vec![nk as i64, nm as i64]).map_err(degenerate("net"))?;
    let mut row = curve.to_vec();
    for (m, t) in trans.iter().enumerate() {
        if m > 0 {
            let mut next = vec![*t];
            for k in 0..nk {
                let p = circular_step(&row[k + 1], &row[k], &next[k], lambda)
                    .map_err(degenerate(format!("face ({k}, {})", m - 1)))?;
                next.push(p);
            }
            row = next;
        }
        for (k, p) in row.iter().enumerate() {
            net.insert(vec![k as i64, m as i64], &p.lift().c)
                .map_err(degenerate("net"))?;
        }
    }
    Ok(net)
}

/// Row-by-row complex cross-ratio evolution; failures name the face (k, m).
fn complex(curve: &[Cp1], trans: &[Cp1], lambda: Complex64, tol: f64) -> CliResult<LatticeNet> {
    check_start(curve[0].dist(&trans[0]) < tol.max(1e-12))?;
    let (nk, nm) = (curve.len() - 1, trans.len() - 1);
    let mut net =
        LatticeNet::new(2, 2, vec![0, 0], vec![nk as i64, nm as i64]).map_err(degenerate("net"))?;
    let mut row = curve.to_vec();
    for (m, t) in trans.iter().enumerate() {
        if m > 0 {
            let mut next = vec![*t];
            for k in 0..nk {
                let p = complex_fourth_point(row[k + 1], row[k], next[k], lambda)
                    .map_err(degenerate(format!("face ({k}, {})", m - 1)))?;
                next.push(p);
            }
            row = next;
        }
        for (k, p) in row.iter().enumerate() {
            net.insert(vec![k as i64, m as i64], &[p.z, p.w])
                .map_err(degenerate("net"))?;
        }
    }
    Ok(net)
}
