use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use billiard_blocks::construction::run_scheme;
use billiard_blocks::curve::{BilliardTable, Vec2};
use billiard_blocks::dynamics::{closed_orbit_from_match, max_perimeter_ngon};
use billiard_blocks::invariants::{compare_tables, invariant_report};
use billiard_blocks::io::{self, RunConfig, RunManifest};
use billiard_blocks::lazutkin::verify_glancing_estimates_from;
use billiard_blocks::verify::{verify_pair, VerifySettings};
use billiard_blocks::Error;

use crate::exit::{Context, Failure, CHECKS_FAILED};
use crate::{Cli, Command, GlobalOpts};

const SHIPPED_CONFIG: &str = include_str!("../../../config/default.toml");

pub fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let g = &cli.global;
    if !(g.tol_scale > 0.0 && g.tol_scale.is_finite()) {
        return Err(Failure::Usage(format!("--tol-scale must be positive, got {}", g.tol_scale)));
    }
    let config = load_config(g)?;
    match &cli.command {
        Command::Construct => construct(g, config),
        Command::Verify { table_a, table_b, certificates } => verify(g, &config, table_a, table_b, certificates),
        Command::Invariants { table, other, glancing } => invariants(g, &config, table, other.as_deref(), *glancing),
        Command::Orbits { table, certs, theta, ngon } => orbits(g, table, certs.as_deref(), theta, ngon),
        Command::Render { tables, orbit, out } => render(tables, orbit, out),
    }
}

fn load_config(g: &GlobalOpts) -> Result<RunConfig, Failure> {
    let (text, origin) = match &g.config {
        Some(path) => (read_input(path)?, path.display().to_string()),
        None => (SHIPPED_CONFIG.to_string(), "shipped default config".to_string()),
    };
    let mut config = io::parse_config(&text).context(origin.clone())?;
    if let Some(seed) = g.seed {
        config.construction.seed = seed;
    }
    config.scale_tolerances(g.tol_scale);
    config.construction.validate().context(origin)?;
    Ok(config)
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if !path.is_file() {
        return Err(Failure::Usage(format!("no such file: {}", path.display())));
    }
    fs::read_to_string(path).map_err(|e| Failure::Lib { context: path.display().to_string(), error: e.into() })
}

fn read_table(path: &Path) -> Result<BilliardTable, Failure> {
    io::parse_table(&read_input(path)?).context(path.display().to_string())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), contents).map_err(|e| Failure::Lib { context: name.to_string(), error: e.into() })
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Lib { context: dir.display().to_string(), error: e.into() })
}

fn construct(g: &GlobalOpts, config: RunConfig) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let outcome = run_scheme(&config.construction)?;
    let scheme_secs = started.elapsed().as_secs_f64();

    let dir = &g.out_dir;
    ensure_dir(dir)?;
    let mut manifest = RunManifest::new("construct", config.clone());
    let mut log = outcome.log.join("\n");
    log.push('\n');
    let files = [
        ("table_a.txt", io::write_table(&outcome.table_a)),
        ("table_b.txt", io::write_table(&outcome.table_b)),
        ("certificates.csv", io::write_certificates(&outcome.certificates)?),
        ("run.log", log),
    ];
    for (name, text) in &files {
        write_file(dir, name, text)?;
        manifest.files.push(name.to_string());
    }
    let c = &config.construction;
    let tolerances = [
        ("match_tol_rel", c.match_tol),
        ("reverify_tol_rel", c.reverify_tol),
        ("table_closure", billiard_blocks::curve::table::CLOSURE_TOL),
        ("orbit_closure", billiard_blocks::dynamics::orbit::ORBIT_CLOSURE_TOL),
        ("non_congruence", billiard_blocks::construction::NON_CONGRUENCE_THRESHOLD),
        ("tol_scale", g.tol_scale),
    ];
    manifest.tolerances.extend(tolerances.iter().map(|(k, v)| (k.to_string(), *v)));
    for (j, eps) in (1..=c.rounds).map(|m| (m, c.epsilon / 2f64.powi(m as i32))) {
        manifest.tolerances.insert(format!("budget_round_{j}"), eps);
    }
    manifest.timings.insert("scheme".into(), scheme_secs);
    manifest.timings.insert("total".into(), started.elapsed().as_secs_f64());
    manifest.write(dir, "manifest.toml")?;

    println!("matched angles:");
    for (j, theta) in outcome.thetas.iter().enumerate() {
        println!("  round {}: theta = {theta:.17e}, period {}", j + 1, outcome.period(j));
    }
    println!("congruence distance {:.6e}", outcome.congruence_distance);
    println!("wrote 5 files to {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(g: &GlobalOpts, config: &RunConfig, a: &Path, b: &Path, certs: &Path) -> Result<ExitCode, Failure> {
    let ta = read_table(a)?;
    let tb = read_table(b)?;
    let certificates = io::parse_certificates(&read_input(certs)?).context(certs.display().to_string())?;
    let settings = VerifySettings {
        grid: config.invariants.grid.clone(),
        terms: config.invariants.terms,
        scale: g.tol_scale,
    };
    let report = verify_pair(&ta, &tb, &certificates, &settings)?;
    print!("{}", report.to_text());
    if report.congruent() {
        println!("note: the tables are congruent, not a counterexample");
    }
    if let Some((theta, residual)) = report.closure_failure {
        return Err(Failure::Lib {
            context: format!("stale certificate at theta = {theta:.17e}"),
            error: Error::ClosureFailure { theta, residual },
        });
    }
    if report.passed() {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("some checks FAILED");
        Ok(ExitCode::from(CHECKS_FAILED))
    }
}

fn invariants(g: &GlobalOpts, config: &RunConfig, table: &Path, other: Option<&Path>, glancing: bool) -> Result<ExitCode, Failure> {
    let ta = read_table(table)?;
    let (grid, terms) = (&config.invariants.grid, config.invariants.terms);
    let mut tables = vec![ta];
    match other {
        None => {
            let r = invariant_report(&tables[0], grid, terms)?;
            print!("{}", r.to_text());
        }
        Some(path) => {
            tables.push(read_table(path)?);
            let cmp = compare_tables(&tables[0], &tables[1], grid, terms)?;
            println!("first table\n{}", cmp.first.to_text());
            println!("second table\n{}", cmp.second.to_text());
            println!("{:<10} {:>12} {:>12}", "invariant", "abs diff", "rel diff");
            for d in &cmp.first.counterpart_diffs {
                println!("{:<10} {:>12.3e} {:>12.3e}", d.name, d.abs, d.rel);
            }
            println!("congruence distance {:.6e}", cmp.congruence_distance);
            ensure_dir(&g.out_dir)?;
            let mut csv = String::from("n,L_first,L_second,diff\n");
            for ((n, la), (_, lb)) in cmp.first.samples.iter().zip(&cmp.second.samples) {
                csv.push_str(&format!("{n},{},{},{}\n", io::fmt_f64(*la), io::fmt_f64(*lb), io::fmt_f64(la - lb)));
            }
            write_file(&g.out_dir, "perimeters.csv", &csv)?;
        }
    }
    if glancing {
        ensure_dir(&g.out_dir)?;
        for (k, t) in tables.iter().enumerate() {
            let rep = verify_glancing_estimates_from(t, &config.lazutkin.y0, config.lazutkin.launches)?;
            let name = if k == 0 { "glancing.csv" } else { "glancing_second.csv" };
            write_file(&g.out_dir, name, &rep.to_delimited())?;
            println!("glancing exponents table {}: e_y = {:.3}, e_x = {:.3}", k + 1, rep.e_y, rep.e_x);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn orbits(g: &GlobalOpts, table: &Path, certs: Option<&Path>, thetas: &[f64], ngons: &[usize]) -> Result<ExitCode, Failure> {
    let t = read_table(table)?;
    let mut angles: Vec<f64> = thetas.to_vec();
    if let Some(path) = certs {
        let list = io::parse_certificates(&read_input(path)?).context(path.display().to_string())?;
        let rounds: BTreeSet<usize> = list.iter().map(|c| c.round).collect();
        for r in rounds {
            angles.push(list.iter().find(|c| c.round == r).expect("round present").theta);
        }
    }
    if angles.is_empty() && ngons.is_empty() {
        return Err(Failure::Usage("give --certs, --theta or --ngon".into()));
    }
    ensure_dir(&g.out_dir)?;
    for (j, &theta) in angles.iter().enumerate() {
        let o = closed_orbit_from_match(&t, theta).context(format!("theta = {theta:.17e}"))?;
        let name = format!("orbit_{}.csv", j + 1);
        write_file(&g.out_dir, &name, &io::write_orbit(&t, &o))?;
        println!("{name}: theta {theta:.17e} period {} perimeter {:.17e}", o.period, o.perimeter);
    }
    for &n in ngons {
        let o = max_perimeter_ngon(&t, n)?;
        let name = format!("ngon_{n}.csv");
        write_file(&g.out_dir, &name, &io::write_orbit(&t, &o))?;
        println!("{name}: perimeter {:.17e} reflection residual {:.1e}", o.perimeter, o.reflection_residual);
    }
    Ok(ExitCode::SUCCESS)
}

fn render(tables: &[PathBuf], orbits: &[PathBuf], out: &Path) -> Result<ExitCode, Failure> {
    if orbits.len() > tables.len() {
        return Err(Failure::Usage("more orbit files than tables".into()));
    }
    let parsed: Vec<BilliardTable> = tables.iter().map(|p| read_table(p)).collect::<Result<_, _>>()?;
    let mut panels = Vec::with_capacity(parsed.len());
    for (k, t) in parsed.iter().enumerate() {
        let orbit = match orbits.get(k) {
            Some(path) => {
                let o = io::parse_orbit(&read_input(path)?).context(path.display().to_string())?;
                Some(o.rows.iter().map(|r| Vec2::new(r.x, r.y)).collect())
            }
            None => None,
        };
        panels.push(io::Panel { table: t, orbit });
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    fs::write(out, io::render_svg(&panels)).map_err(|e| Failure::Lib { context: out.display().to_string(), error: e.into() })?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

