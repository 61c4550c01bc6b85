//! Subcommand implementations. Every command writes machine-readable
//! files under the output directory and prints a one-line summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use ustat_core::bounds::{
    gamma_table, moment_bound_detailed, moment_bound_normalized, osekowski_constant, BoundInput,
};
use ustat_core::gls::{
    gls_norm_ln, natural_psi, psi_d_transform, tail_envelope, theorem31_bound,
};
use ustat_core::hoeffding::decompose;
use ustat_core::model::{center, kernel_lp_norm, kernel_lp_norm_ln, Kernel};
use ustat_core::montecarlo::{run_report, verify, SimulationPlan, SimulationReport};

use crate::config::RunConfig;

/// Failures grouped by the exit code they map to.
pub enum CmdError {
    /// Bad config or parameters: exit 1.
    Validation(String),
    /// A computation refused to produce a result: exit 2.
    Computation(String),
}

impl From<ustat_core::Error> for CmdError {
    fn from(e: ustat_core::Error) -> Self {
        use ustat_core::Error::*;
        match e {
            Param(_) | InvalidDistribution(_) | InvalidPsi(_) | Domain(_) => {
                CmdError::Validation(e.to_string())
            }
            _ => CmdError::Computation(e.to_string()),
        }
    }
}

impl From<String> for CmdError {
    fn from(s: String) -> Self {
        CmdError::Validation(s)
    }
}

type CmdResult = Result<(), CmdError>;

fn write_json(out: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(out)
        .map_err(|e| CmdError::Validation(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CmdError::Computation(format!("serialization: {e}")))?;
    text.push('\n');
    fs::write(&path, text)
        .map_err(|e| CmdError::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_csv(out: &Path, name: &str, header: &str, rows: &[String]) -> Result<PathBuf, CmdError> {
    fs::create_dir_all(out)
        .map_err(|e| CmdError::Validation(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    let mut f = fs::File::create(&path)
        .map_err(|e| CmdError::Validation(format!("cannot write {}: {e}", path.display())))?;
    writeln!(f, "{header}").and_then(|_| {
        for r in rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    })
    .map_err(|e| CmdError::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn constants(out: &Path) -> CmdResult {
    let k = osekowski_constant();
    let gammas = gamma_table(6);
    let value = json!({
        "k_os": k,
        "gamma": gammas,
    });
    let path = write_json(out, "constants.json", &value)?;
    println!("constants: K_Os = {k:.6}, gamma(1..6) written to {}", path.display());
    Ok(())
}

pub fn decompose_cmd(cfg: &RunConfig, out: &Path) -> CmdResult {
    let (dist, kernel) = cfg.model()?;
    let ck = center(&kernel, &dist)?;
    let set = decompose(&ck, &dist)?;
    let mut projections = Vec::new();
    for m in 1..=set.degree() {
        let g = set.projection(m);
        let support = g.support().to_vec();
        let mut entries = Vec::new();
        let s = support.len();
        for (flat, &v) in g.values().iter().enumerate() {
            let mut args = Vec::with_capacity(m);
            let mut rem = flat;
            for k in (0..m).rev() {
                args.push(support[rem / s.pow(k as u32)]);
                rem %= s.pow(k as u32);
            }
            entries.push(json!({"args": args, "value": v}));
        }
        projections.push(json!({
            "m": m,
            "variance": set.variance_of(m),
            "table": entries,
        }));
    }
    let value = json!({
        "kernel": kernel.name(),
        "degree": set.degree(),
        "rank": set.rank(),
        "mean": ck.mean(),
        "kernel_variance": ck.variance(),
        "projections": projections,
    });
    let path = write_json(out, "decompose.json", &value)?;
    println!(
        "decompose: {} has rank {} of degree {}; tables in {}",
        kernel.name(),
        set.rank(),
        set.degree(),
        path.display()
    );
    Ok(())
}

pub fn variance_cmd(cfg: &RunConfig, out: &Path) -> CmdResult {
    let (dist, kernel) = cfg.model()?;
    let ck = center(&kernel, &dist)?;
    let set = decompose(&ck, &dist)?;
    let ns = cfg.sample_sizes(kernel.arity())?;
    let mut rows = Vec::new();
    for &n in &ns {
        let exact = set.variance_exact(n)?;
        let asymptotic = set.variance_asymptotic(n)?;
        rows.push(json!({
            "n": n,
            "sigma2_exact": exact,
            "sigma2_asymptotic": asymptotic,
            "ratio": asymptotic / exact,
        }));
    }
    let value = json!({
        "kernel": kernel.name(),
        "rank": set.rank(),
        "per_n": rows,
    });
    let path = write_json(out, "variance.json", &value)?;
    println!("variance: {} sample sizes written to {}", ns.len(), path.display());
    Ok(())
}

pub fn bound_cmd(cfg: &RunConfig, out: &Path) -> CmdResult {
    let gammas = gamma_table(8);
    let value = if cfg.kernel.is_some() && cfg.dist.is_some() {
        let (dist, kernel) = cfg.model()?;
        let ck = center(&kernel, &dist)?;
        let set = decompose(&ck, &dist)?;
        let ns = cfg.sample_sizes(kernel.arity())?;
        let ps = cfg.moment_orders();
        let mut entries = Vec::new();
        for &n in &ns {
            let sigma = set.variance_exact(n)?.sqrt();
            for &p in &ps {
                let phi_p = kernel_lp_norm(&centered_kernel(&ck), &dist, p)?;
                let input = BoundInput {
                    d: kernel.arity(),
                    r: set.rank(),
                    n,
                    p,
                    phi_p,
                };
                let detailed = moment_bound_detailed(&input)?;
                let nb = moment_bound_normalized(&input, sigma)?;
                entries.push(json!({
                    "n": n, "p": p, "phi_p": phi_p, "sigma": sigma,
                    "detailed": detailed, "normalized": nb.bound, "c_eff": nb.c_eff,
                    "sigma_source": "exact",
                }));
            }
        }
        json!({
            "kernel": kernel.name(),
            "rank": set.rank(),
            "bounds": entries,
            "gamma_table": gammas,
        })
    } else if let Some(b) = cfg.bound {
        let input = BoundInput {
            d: b.d,
            r: b.r,
            n: b.n,
            p: b.p,
            phi_p: b.phi_p,
        };
        let detailed = moment_bound_detailed(&input)?;
        // no attached law: normalize by the unit-variance proxy n^{-r/2}
        let sigma = (b.n as f64).powf(-(b.r as f64) / 2.0);
        let nb = moment_bound_normalized(&input, sigma)?;
        json!({
            "bounds": [{
                "n": b.n, "p": b.p, "phi_p": b.phi_p, "sigma": sigma,
                "detailed": detailed, "normalized": nb.bound, "c_eff": nb.c_eff,
                "sigma_source": "unit_variance_proxy",
            }],
            "gamma_table": gammas,
        })
    } else {
        return Err(CmdError::Validation(
            "bound needs either `kernel` + `dist` or an explicit `bound` section".to_string(),
        ));
    };
    let path = write_json(out, "bound.json", &value)?;
    println!("bound: written to {}", path.display());
    Ok(())
}

fn centered_kernel(ck: &ustat_core::model::CenteredKernel) -> Kernel {
    let base = ck.base().clone();
    let mean = ck.mean();
    Kernel::custom(
        format!("{}_centered", base.name()),
        base.arity(),
        move |a| base.eval(a) - mean,
    )
}

pub fn norm_cmd(cfg: &RunConfig, out: &Path) -> CmdResult {
    let (dist, kernel) = cfg.model()?;
    let ck = center(&kernel, &dist)?;
    let set = decompose(&ck, &dist)?;
    let ns = cfg.sample_sizes(kernel.arity())?;
    let psi = natural_psi(&ck, &dist)?;
    let centered = centered_kernel(&ck);
    let own_norm = gls_norm_ln(|p| kernel_lp_norm_ln(&centered, &dist, p).unwrap(), &psi)?;
    let t31 = theorem31_bound(&set, &ns)?;
    let psi_d = psi_d_transform(&psi, kernel.arity());
    let mut curve = Vec::new();
    let mut p = 2.0f64;
    while p <= 512.0 {
        curve.push(format!("{p},{},{}", psi.eval(p), psi_d.eval(p)));
        p *= 1.25;
    }
    let csv = write_csv(out, "psi_curve.csv", "p,psi,psi_d", &curve)?;
    let value = json!({
        "kernel": kernel.name(),
        "natural_norm": own_norm,
        "theorem_bound": t31,
        "n_values": ns,
        "psi_curve": csv.display().to_string(),
    });
    let path = write_json(out, "norm.json", &value)?;
    println!(
        "norm: ||Phi|| = {own_norm:.6} under its natural psi; uniform bound {t31:.4}; {}",
        path.display()
    );
    Ok(())
}

pub fn tail_cmd(cfg: &RunConfig, out: &Path, seed: u64, workers: usize) -> CmdResult {
    let (dist, kernel) = cfg.model()?;
    let ck = center(&kernel, &dist)?;
    let set = decompose(&ck, &dist)?;
    let ns = cfg.sample_sizes(kernel.arity())?;
    let psi_d = psi_d_transform(&natural_psi(&ck, &dist)?, kernel.arity());
    let bound = theorem31_bound(&set, &ns)?;
    let envelope = tail_envelope(&psi_d, bound)?;
    let grid = cfg.tail_points()?;
    // empirical side: the max over the simulated sample sizes, matching
    // the uniform-in-n tail
    let empirical = if let Some(reps) = cfg.replications {
        let plan = SimulationPlan {
            kernel: kernel.clone(),
            dist: dist.clone(),
            n_values: ns.clone(),
            replications: reps,
            p_values: vec![2.0],
            tail_grid: grid.clone(),
            master_seed: seed,
        };
        let report = with_workers(workers, || run_report(&plan))?;
        let mut max_tail = vec![0.0f64; grid.len()];
        for section in &report.per_n {
            for (i, t) in section.tails.iter().enumerate() {
                max_tail[i] = max_tail[i].max(t.empirical);
            }
        }
        Some(max_tail)
    } else {
        None
    };
    let rows: Vec<String> = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let e = if x > 0.0 { envelope.eval(x) } else { 1.0 };
            match &empirical {
                Some(emp) => format!("{x},{e},{}", emp[i]),
                None => format!("{x},{e},"),
            }
        })
        .collect();
    let path = write_csv(out, "tail_envelope.csv", "x,envelope,empirical_tail", &rows)?;
    println!(
        "tail: envelope over {} levels (bound {bound:.4}) written to {}",
        grid.len(),
        path.display()
    );
    Ok(())
}

fn build_plan(cfg: &RunConfig, seed: u64) -> Result<SimulationPlan, CmdError> {
    let (dist, kernel) = cfg.model()?;
    let ns = cfg.sample_sizes(kernel.arity())?;
    Ok(SimulationPlan {
        kernel,
        dist,
        n_values: ns,
        replications: cfg.replications.unwrap_or(100_000),
        p_values: cfg.moment_orders(),
        tail_grid: cfg.tail_points()?,
        master_seed: seed,
    })
}

fn with_workers<T>(
    workers: usize,
    f: impl FnOnce() -> ustat_core::Result<T> + Send,
) -> Result<T, CmdError>
where
    T: Send,
{
    if workers == 0 {
        return f().map_err(CmdError::from);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CmdError::Computation(format!("thread pool: {e}")))?;
    pool.install(f).map_err(CmdError::from)
}

fn write_report_files(report: &SimulationReport, out: &Path) -> Result<PathBuf, CmdError> {
    let value = serde_json::to_value(report)
        .map_err(|e| CmdError::Computation(format!("serialization: {e}")))?;
    let path = write_json(out, "report.json", &value)?;
    let mut moment_rows = Vec::new();
    for section in &report.per_n {
        for m in &section.moments {
            moment_rows.push(format!(
                "{},{},{},{},{},{},{}",
                section.n, m.p, m.empirical, m.se, m.bound, m.c_eff, m.slack
            ));
        }
    }
    write_csv(
        out,
        "moments.csv",
        "n,p,empirical,se,bound,c_eff,slack",
        &moment_rows,
    )?;
    for section in &report.per_n {
        let rows: Vec<String> = section
            .tails
            .iter()
            .map(|t| {
                format!(
                    "{},{},{},{},{}",
                    t.x, t.empirical, t.se, t.envelope, t.resolved
                )
            })
            .collect();
        write_csv(
            out,
            &format!("tails_n{}.csv", section.n),
            "x,empirical,se,envelope,resolved",
            &rows,
        )?;
    }
    Ok(path)
}

pub fn simulate_cmd(cfg: &RunConfig, out: &Path, seed: u64, workers: usize) -> CmdResult {
    let plan = build_plan(cfg, seed)?;
    let report = with_workers(workers, || run_report(&plan))?;
    let path = write_report_files(&report, out)?;
    println!(
        "simulate: {} x {} replications (seed {seed}) written to {}",
        plan.n_values.len(),
        plan.replications,
        path.display()
    );
    Ok(())
}

/// Returns Ok(true) when every comparison passed.
pub fn verify_cmd(
    cfg: &RunConfig,
    out: &Path,
    seed: u64,
    workers: usize,
    negative_control: bool,
) -> Result<bool, CmdError> {
    let plan = build_plan(cfg, seed)?;
    let report = with_workers(workers, || run_report(&plan))?;
    write_report_files(&report, out)?;
    let scale = if negative_control { 0.5 } else { 1.0 };
    let verdicts = verify(&report, scale);
    let failures = verdicts.iter().filter(|v| !v.pass).count();
    let value = json!({
        "scale": scale,
        "negative_control": negative_control,
        "total": verdicts.len(),
        "failures": failures,
        "verdicts": serde_json::to_value(&verdicts)
            .map_err(|e| CmdError::Computation(format!("serialization: {e}")))?,
    });
    let path = write_json(out, "verdicts.json", &value)?;
    println!(
        "verify: {} checks, {} failures{} -> {}",
        verdicts.len(),
        failures,
        if negative_control { " (negative control)" } else { "" },
        path.display()
    );
    Ok(failures == 0)
}
