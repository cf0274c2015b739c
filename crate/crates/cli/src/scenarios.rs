//! Scenario dispatch and CSV emission.
//!
//! Every output file carries a header row, data rows at 17 significant
//! digits, and trailing `# key=value` comment lines recording the config
//! hash and the accuracy actually achieved.

use std::fs;
use std::path::{Path, PathBuf};

use billiard_core::{
    com_domain, covariance_closed_form_example, covariance_direct, evolve_superposition,
    greens_spectral_oracle, greens_theta, propagate_grid, spectral_tail_estimate, EigenState,
    GridState, MomentSource, Point2, QuantumNumbers, Region, Shape, ShapeDomain, Superposition,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DomainFamily, RunConfig, ScenarioKind};
use crate::CliError;

pub struct RunContext<'a> {
    pub cfg: &'a RunConfig,
    pub out_dir: &'a Path,
    pub config_sha256: &'a str,
    pub verbose: bool,
}

impl RunContext<'_> {
    fn write_file(&self, name: &str, body: &str, meta: &[(&str, String)]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        let mut text = String::from(body);
        if !text.ends_with('\n') {
            text.push('\n');
        }
        text.push_str(&format!("# config_sha256={}\n", self.config_sha256));
        for (key, value) in meta {
            text.push_str(&format!("# {key}={value}\n"));
        }
        fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn log(&self, msg: &str) {
        if self.verbose {
            println!("{msg}");
        }
    }
}

fn build_superposition(cfg: &RunConfig) -> Result<Superposition, CliError> {
    let terms = cfg
        .qn
        .iter()
        .zip(&cfg.coeffs)
        .map(|(&qn, &c)| Ok((c, EigenState::new(cfg.shape, qn, cfg.spec)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Superposition::new(terms)?)
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn grid_csv(grid: &GridState) -> Result<String, CliError> {
    let mut buf = Vec::new();
    grid.to_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("grid csv is ascii"))
}

pub fn run(ctx: &RunContext) -> Result<(), CliError> {
    match ctx.cfg.scenario {
        ScenarioKind::Eigen => run_eigen(ctx),
        ScenarioKind::Evolve => run_evolve(ctx),
        ScenarioKind::Covariance => run_covariance(ctx),
        ScenarioKind::GreensCheck => run_greens_check(ctx),
        ScenarioKind::Domain => run_domain(ctx),
    }
}

/// Grid dump of the configured state plus an energy report on stdout.
fn run_eigen(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let state = build_superposition(cfg)?;
    for (_, term) in state.terms() {
        let qn = term.quantum_numbers();
        println!(
            "energy shape={} n1={} n2={} value={}",
            cfg.shape.name(),
            qn.n1,
            qn.n2,
            fmt(term.energy())
        );
    }
    let grid = GridState::from_superposition(&state, cfg.grid_nx, cfg.grid_ny)?;
    ctx.write_file(
        &format!("{}.csv", cfg.stem()),
        &grid_csv(&grid)?,
        &[
            ("construction_defect", fmt(grid.construction_defect())),
            ("grid", format!("{}x{}", cfg.grid_nx, cfg.grid_ny)),
        ],
    )?;
    Ok(())
}

/// Grid snapshots at each sample time. Billiard shapes propagate through the
/// damped theta kernel from the t = 0 lattice; the two-particle box evolves
/// by exact phase rotation.
fn run_evolve(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let state = build_superposition(cfg)?;
    let initial = GridState::from_superposition(&state, cfg.grid_nx, cfg.grid_ny)?;
    for (k, t) in cfg.time.times().into_iter().enumerate() {
        let snapshot = if cfg.shape == Shape::TwoParticleBox {
            GridState::from_superposition(&evolve_superposition(&state, t), cfg.grid_nx, cfg.grid_ny)?
        } else {
            propagate_grid(&initial, t, &cfg.theta)?
        };
        ctx.log(&format!("step {k}: t = {t}"));
        ctx.write_file(
            &format!("{}_{k:03}.csv", cfg.stem()),
            &grid_csv(&snapshot)?,
            &[
                ("t", fmt(t)),
                ("epsilon", fmt(cfg.theta.epsilon)),
                ("norm_sq", fmt(snapshot.norm_sq())),
                ("construction_defect", fmt(initial.construction_defect())),
            ],
        )?;
    }
    Ok(())
}

/// Whether the configured state is the two-mode example
/// (Phi_11 + Phi_22)/sqrt(2), for which the reference closed-form trace
/// applies.
fn is_two_mode_example(state: &Superposition) -> bool {
    if state.shape() != Shape::TwoParticleBox || state.terms().len() != 2 {
        return false;
    }
    let (c1, s1) = &state.terms()[0];
    let (c2, s2) = &state.terms()[1];
    let want = |s: &EigenState, n: u32| {
        s.quantum_numbers() == QuantumNumbers::new(n, n).expect("nonzero")
    };
    let modes_match =
        (want(s1, 1) && want(s2, 2)) || (want(s1, 2) && want(s2, 1));
    let equal_real = (c1 - c2).norm() < 1e-12 && c1.im.abs() < 1e-12;
    modes_match && equal_real
}

/// Covariance trace; adds the reference closed-form columns when the state
/// is the two-mode example.
fn run_covariance(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let state = build_superposition(cfg)?;
    let example = is_two_mode_example(&state);
    let header = if example {
        "t,cov,cov_paper_closed_form,abs_diff"
    } else {
        "t,cov"
    };
    let mut rows = vec![header.to_string()];
    for t in cfg.time.times() {
        let cov = covariance_direct(MomentSource::from(&state), t, &cfg.quad)?;
        ctx.log(&format!("t = {t}: cov = {cov:.6e}"));
        if example {
            let reference = covariance_closed_form_example(&cfg.spec, t);
            rows.push(format!(
                "{},{},{},{}",
                fmt(t),
                fmt(cov),
                fmt(reference),
                fmt((cov - reference).abs())
            ));
        } else {
            rows.push(format!("{},{}", fmt(t), fmt(cov)));
        }
    }
    ctx.write_file(
        &format!("{}.csv", cfg.stem()),
        &rows.join("\n"),
        &[
            ("quad_order", cfg.quad.order.to_string()),
            (
                "quad_refine_tol",
                cfg.quad
                    .refine_tol
                    .map_or_else(|| "default".into(), fmt),
            ),
        ],
    )?;
    Ok(())
}

fn random_interior(domain: &ShapeDomain, rng: &mut ChaCha8Rng) -> Point2 {
    let (lo, hi) = domain.polygon().bounding_box();
    loop {
        let p = Point2::new(
            rng.random_range(lo.u..=hi.u),
            rng.random_range(lo.v..=hi.v),
        );
        if domain.contains(p, 0.0) == Region::Interior {
            return p;
        }
    }
}

/// Theta-form kernel against the equally damped spectral oracle on random
/// (p, p', t) tuples.
fn run_greens_check(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let spec = cfg.spec;
    let domain = ShapeDomain::new(cfg.shape, spec);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.greens.seed);
    // Kernel magnitude scale: the squared eigenfunction amplitude, used to
    // keep the relative difference meaningful near zeros of the kernel.
    let scale = match cfg.shape {
        Shape::Triangle => 4.0 / (spec.d * spec.d),
        Shape::Rectangle => 1.0 / (spec.d * spec.d * (spec.a * spec.b).sqrt()),
        _ => 1.0 / (spec.d * spec.d),
    };
    let tail = spectral_tail_estimate(cfg.shape, &spec, cfg.greens.n_cut, cfg.theta.epsilon);
    let mut rows = vec!["u,v,up,vp,t,theta_re,theta_im,oracle_re,oracle_im,rel_diff".to_string()];
    let mut worst = 0.0f64;
    for k in 0..cfg.greens.samples {
        let p = random_interior(&domain, &mut rng);
        let pp = random_interior(&domain, &mut rng);
        let t = rng.random_range(0.0..cfg.greens.time_max);
        let theta_side = greens_theta(cfg.shape, p, pp, t, &spec, &cfg.theta)?;
        let oracle = greens_spectral_oracle(
            cfg.shape,
            p,
            pp,
            t,
            &spec,
            cfg.greens.n_cut,
            cfg.theta.epsilon,
        )?;
        let rel = (theta_side - oracle).norm() / oracle.norm().max(1e-2 * scale);
        worst = worst.max(rel);
        ctx.log(&format!("sample {k}: rel_diff = {rel:.3e}"));
        rows.push(
            [p.u, p.v, pp.u, pp.v, t, theta_side.re, theta_side.im, oracle.re, oracle.im, rel]
                .map(fmt)
                .join(","),
        );
    }
    ctx.write_file(
        &format!("{}.csv", cfg.stem()),
        &rows.join("\n"),
        &[
            ("max_rel_diff", fmt(worst)),
            ("oracle_tail_estimate", fmt(tail)),
            ("n_cut", cfg.greens.n_cut.to_string()),
            ("epsilon", fmt(cfg.theta.epsilon)),
            ("seed", cfg.greens.seed.to_string()),
        ],
    )?;
    Ok(())
}

/// Vertex dump of the center-of-mass polygon or a billiard shape polygon.
fn run_domain(ctx: &RunContext) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let (header, vertices) = match cfg.domain_family {
        DomainFamily::Com => {
            let dom = com_domain(&cfg.spec, cfg.impenetrable);
            ("Xc,x", dom.polygon().vertices().to_vec())
        }
        DomainFamily::Shape => {
            let dom = ShapeDomain::new(cfg.shape, cfg.spec);
            ("x1,x2", dom.polygon().vertices().to_vec())
        }
    };
    let mut rows = vec![header.to_string()];
    for p in vertices {
        rows.push(format!("{},{}", fmt(p.u), fmt(p.v)));
    }
    ctx.write_file(&format!("{}.csv", cfg.stem()), &rows.join("\n"), &[])?;
    Ok(())
}
