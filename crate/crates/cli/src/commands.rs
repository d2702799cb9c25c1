//! One function per subcommand. Each computes its artifacts without touching
//! the filesystem so a failed run leaves nothing behind.

use causal_core::jets::{assemble_laplacian, el_residual_with, ell, locality_rows, LocalityRow};
use causal_core::kernel::{classify_pair, lagrangian};
use causal_core::lattice::{
    correlation_map, orthonormalize, random_waves, simple_action_descent, wave_equation_sources,
};
use causal_core::solver::{minimize, tau_sweep, SweepRow};
use causal_core::sphere::{embed, profile, SphereSystem};
use causal_core::surface::{surface_rows, Region, SurfaceRow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::*;
use crate::output::{Artifact, Header, Table};
use crate::Failure;

/// Files to write plus numerical warnings that turn into exit code 3.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub flags: Vec<String>,
}

fn support_table(sys: &SphereSystem) -> Table {
    let mut t = Table::new(&["index", "x", "y", "z", "weight", "ell"]);
    for (i, (p, w)) in sys.points().iter().zip(sys.weights()).enumerate() {
        let [x, y, z] = *p.coords();
        t.push(vec![
            i.into(),
            x.into(),
            y.into(),
            z.into(),
            (*w).into(),
            ell(sys, p).into(),
        ]);
    }
    t
}

pub fn sphere_minimize(cfg: &MinimizeConfig, header: &Header) -> Result<Outcome, Failure> {
    let mut minimizer = cfg.minimizer.clone();
    minimizer.seed = cfg.seed;
    let report = minimize(cfg.tau, &minimizer)?;
    let mut out = Outcome::default();
    if !report.converged {
        out.flags.push(format!(
            "minimizer did not converge within {} iterations",
            minimizer.max_iters
        ));
    }
    out.artifacts
        .push(Artifact::json("report", &report, header));
    out.artifacts.push(Artifact::table(
        "support",
        &support_table(&report.final_system),
        header,
        cfg.format,
    ));
    Ok(out)
}

pub fn sweep(cfg: &SweepConfig, header: &Header) -> Result<Outcome, Failure> {
    let mut minimizer = cfg.minimizer.clone();
    minimizer.seed = cfg.seed;
    let rows = tau_sweep(&cfg.taus, &minimizer)?;
    let mut t = Table::new(&SweepRow::CSV_HEADER.split(',').collect::<Vec<_>>());
    let mut out = Outcome::default();
    for r in &rows {
        if !r.converged {
            out.flags.push(format!("tau {} did not converge", r.tau));
        }
        t.push(vec![
            r.tau.into(),
            r.best_action.into(),
            r.cluster_count.into(),
            r.min_angle.into(),
            r.el_spread.into(),
            r.boundary_angle.into(),
            r.converged.into(),
        ]);
    }
    out.artifacts
        .push(Artifact::table("sweep", &t, header, cfg.format));
    Ok(out)
}

pub fn el_check(cfg: &ElCheckConfig, header: &Header) -> Result<Outcome, Failure> {
    let sys = cfg.system.build(cfg.tau)?;
    let report = el_residual_with(&sys, cfg.support_threshold, cfg.probe_points);
    let mut out = Outcome::default();
    if !report.el_spread.is_finite() || !report.nu.is_finite() {
        out.flags.push("non-finite Euler-Lagrange residual".into());
    }
    out.artifacts
        .push(Artifact::json("el_report", &report, header));
    out.artifacts.push(Artifact::table(
        "support",
        &support_table(&sys),
        header,
        cfg.format,
    ));
    Ok(out)
}

fn locality_table(rows: &[LocalityRow]) -> Table {
    let mut t = Table::new(&LocalityRow::CSV_HEADER.split(',').collect::<Vec<_>>());
    for r in rows {
        t.push(vec![
            r.i.into(),
            r.j.into(),
            r.angle.into(),
            r.coupling_norm.into(),
        ]);
    }
    t
}

pub fn laplacian(cfg: &LaplacianConfig, header: &Header) -> Result<Outcome, Failure> {
    let sys = cfg.system.build(cfg.tau)?;
    let nu = match cfg.nu {
        Some(nu) => nu,
        None => el_residual_with(&sys, causal_core::jets::DEFAULT_SUPPORT_THRESHOLD, 0).nu,
    };
    let matrix = assemble_laplacian(&sys, nu);
    let mut out = Outcome::default();
    if matrix.boundary_contact {
        out.flags
            .push("support pairs touch the D = 0 boundary; derivatives are one-sided there".into());
    }
    out.artifacts.push(match cfg.format {
        Format::Csv => Artifact::binary(
            "laplacian.bin",
            "u64 dim, then dim*dim f64 row-major, little endian",
            &matrix.to_le_bytes(),
            header,
        ),
        Format::Json => Artifact::json("laplacian", &matrix, header),
    });
    out.artifacts.push(Artifact::table(
        "locality",
        &locality_table(&locality_rows(&sys, &matrix)),
        header,
        cfg.format,
    ));
    Ok(out)
}

pub fn surface_layer(cfg: &SurfaceConfig, header: &Header) -> Result<Outcome, Failure> {
    let sys = cfg.system.build(cfg.tau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let u = cfg.u.build(&sys, &mut rng)?;
    let v = cfg.v.build(&sys, &mut rng)?;
    let mut t = Table::new(&SurfaceRow::CSV_HEADER.split(',').collect::<Vec<_>>());
    let mut out = Outcome::default();
    for spec in &cfg.regions {
        let region = Region::new(spec.inside.iter().copied(), sys.len())?;
        for r in surface_rows(&sys, &spec.id, &region, &u, &v)? {
            if r.boundary_contact {
                out.flags.push(format!(
                    "region {} crosses the D = 0 boundary ({})",
                    r.omega_id, r.form
                ));
            }
            t.push(vec![
                r.omega_id.as_str().into(),
                r.form.to_string().into(),
                r.value.into(),
                r.non_positive.into(),
                r.boundary_contact.into(),
            ]);
        }
    }
    out.artifacts
        .push(Artifact::table("surface", &t, header, cfg.format));
    Ok(out)
}

pub fn lattice_demo(cfg: &LatticeConfig, header: &Header) -> Result<Outcome, Failure> {
    let spec = cfg.spec();
    spec.validate()?;
    if cfg.f == 0 {
        return Err(Failure::Config("f must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let raw = match cfg.source {
        WaveSource::WaveEquation => wave_equation_sources(&spec, cfg.f, &mut rng)?,
        WaveSource::Random => random_waves(&spec, cfg.f, &mut rng),
    };
    let family = orthonormalize(&spec, raw)?;
    let ops = correlation_map(&family)?;
    let (weights, actions) = simple_action_descent(&ops, cfg.steps)?;

    let mut action = Table::new(&["step", "action"]);
    for (k, a) in actions.iter().enumerate() {
        action.push(vec![k.into(), (*a).into()]);
    }
    let mut traces = Table::new(&["t", "x", "trace", "weight"]);
    for (p, (op, w)) in ops.iter().zip(&weights).enumerate() {
        traces.push(vec![
            (p / spec.nx).into(),
            (p % spec.nx).into(),
            op.trace().into(),
            (*w).into(),
        ]);
    }
    let mut fields = Table::new(&["wave", "t", "x", "re", "im"]);
    for (k, wave) in family.waves.iter().enumerate() {
        for (p, z) in wave.iter().enumerate() {
            fields.push(vec![
                k.into(),
                (p / spec.nx).into(),
                (p % spec.nx).into(),
                z.re.into(),
                z.im.into(),
            ]);
        }
    }
    let mut out = Outcome::default();
    if actions.iter().any(|a| !a.is_finite()) {
        out.flags.push("non-finite toy action".into());
    }
    out.artifacts
        .push(Artifact::table("action", &action, header, cfg.format));
    out.artifacts
        .push(Artifact::table("traces", &traces, header, cfg.format));
    out.artifacts
        .push(Artifact::table("fields", &fields, header, cfg.format));
    Ok(out)
}

pub fn classify(cfg: &ClassifyConfig, header: &Header) -> Result<Outcome, Failure> {
    let sys = cfg.system.build(cfg.tau)?;
    let embedded: Vec<_> = sys.points().iter().map(|p| embed(p, cfg.tau)).collect();
    let mut t = Table::new(&["i", "j", "angle_deg", "relation", "lagrangian"]);
    for i in 0..sys.len() {
        for j in 0..sys.len() {
            if i == j {
                continue;
            }
            let relation = classify_pair(&embedded[i], &embedded[j], cfg.rel_tol)?;
            let l = lagrangian(&embedded[i], &embedded[j])?;
            let angle = sys.points()[i].angle(&sys.points()[j]).to_degrees();
            t.push(vec![
                i.into(),
                j.into(),
                angle.into(),
                relation.to_string().into(),
                l.into(),
            ]);
        }
    }
    Ok(Outcome {
        artifacts: vec![Artifact::table("relations", &t, header, cfg.format)],
        flags: Vec::new(),
    })
}

pub fn kernel_profile(cfg: &ProfileConfig, header: &Header) -> Result<Outcome, Failure> {
    if cfg.samples == 0 {
        return Err(Failure::Config("samples must be positive".into()));
    }
    let mut t = Table::new(&["angle_deg", "angle_rad", "script_d", "lagrangian"]);
    for r in profile(cfg.tau, cfg.samples)? {
        t.push(vec![
            r.angle.to_degrees().into(),
            r.angle.into(),
            r.script_d.into(),
            r.lagrangian.into(),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![Artifact::table("profile", &t, header, cfg.format)],
        flags: Vec::new(),
    })
}
