use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bcbounds::dyadic::{self, DyadicConfig, DyadicSequence};
use bcbounds::paper::{paper_instance, verify_instance};
use bcbounds::rational::{fmt_decimal, fmt_exact, to_f64};
use bcbounds::report::{BoundKind, BoundReport};
use bcbounds::search::{self, SearchConfig};
use bcbounds::sequence::{default_p_grid, ms_estimate, EventSequence, Exponent, Subsequence};
use bcbounds::spacefile::{parse_space, parse_space_with_warnings};
use bcbounds::{Error, EventSystem, Result};

/// Largest prefix length accepted by `dyadic`.
const MAX_DYADIC_N: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(
    name = "bcbounds",
    version,
    about = "Exact union-probability lower bounds and Borel-Cantelli prefix functionals"
)]
#[command(after_help = "Exit codes: 0 ok, 1 verification failure, 2 parse/usage, 3 domain, 4 resource guard, 5 I/O.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute bounds for a space file.
    ///
    /// Output: one tab-separated row per bound (instance, bound, exact, decimal),
    /// followed by `#` diagnostic lines.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        /// gk, kat, ce, union or all
        #[arg(long, default_value = "all")]
        bound: String,
    },
    /// Rebuild the embedded six-event instance and check its joint matrix and
    /// bound values.
    VerifyPaper,
    /// Check the moment bound chain on the dyadic sequence and scan the MS
    /// functional.
    ///
    /// Chain rows: n, p, E(alpha_n^p), rhs, step a, step b, monotone, step c.
    /// MS rows: p, windowed max of E^(1/(1-p)), argmax n, windowed max of E.
    Dyadic {
        #[arg(long = "N")]
        n: usize,
        /// Comma-separated exponents in (0, 1)
        #[arg(long, default_value = "0.5,0.25,0.1,0.05")]
        p: String,
        /// identity, stride:EXPR (e.g. 2^n, 2^(n-1), 3n+1), or list:PATH
        #[arg(long, default_value = "identity")]
        tau: String,
        /// Trailing window fraction for the limsup surrogate
        #[arg(long, default_value_t = 0.5)]
        window: f64,
    },
    /// Random search for systems with KAT > GK.
    ///
    /// Writes `<out>/hit_<k>.space` per hit and `<out>/summary.tsv` with columns
    /// rank, source, gap, gk, kat, union, gap_decimal.
    Search {
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        events: usize,
        #[arg(long)]
        granularity: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Space files evaluated alongside the random trials
        #[arg(long)]
        include: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds { input, bound } => cmd_bounds(&input, &bound),
        Command::VerifyPaper => cmd_verify_paper(),
        Command::Dyadic { n, p, tau, window } => cmd_dyadic(n, &p, &tau, window),
        Command::Search { atoms, events, granularity, trials, seed, include, out } => {
            cmd_search(SearchConfig { atoms, events, trials, seed, granularity }, &include, &out)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        // a closed downstream pipe (e.g. `| head`) is not a failure
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<EventSystem> {
    let text = fs::read_to_string(path)?;
    let (sys, warnings) = parse_space_with_warnings(&text).map_err(|mut e| {
        e.message = format!("{}: {}", path.display(), e.message);
        e
    })?;
    for w in warnings {
        eprintln!("warning: {}:{}: {}", path.display(), w.line, w.message);
    }
    Ok(sys)
}

fn cmd_bounds(input: &Path, selector: &str) -> Result<u8> {
    let kinds = BoundKind::parse_selector(selector)?;
    let sys = load(input)?;
    let name = input.display().to_string();
    let mut out = std::io::stdout().lock();
    writeln!(out, "instance\tbound\texact\tdecimal")?;
    for kind in kinds {
        writeln!(out, "{}", BoundReport::compute(&name, &sys, kind)?)?;
    }
    Ok(0)
}

fn cmd_verify_paper() -> Result<u8> {
    let sys = paper_instance();
    let checks = verify_instance(&sys)?;
    let mut out = std::io::stdout().lock();
    write!(out, "joint matrix:\n{}", sys.joint_matrix())?;
    for c in &checks {
        writeln!(out, "{}\t{}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "{passed}/{} PASS", checks.len())?;
    Ok(if passed == checks.len() { 0 } else { 1 })
}

fn parse_p_list(list: &str) -> Result<Vec<Exponent>> {
    let ps =
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Exponent::parse).collect::<Result<Vec<_>>>()?;
    if ps.is_empty() {
        return Err(Error::domain("empty --p list"));
    }
    if let Some(p) = ps.iter().find(|p| to_f64(p.value()) >= 1.0) {
        return Err(Error::domain(format!("p = {p} rejected: exponents must lie in (0, 1)")));
    }
    Ok(ps)
}

fn parse_tau(spec: &str) -> Result<Subsequence> {
    match spec.strip_prefix("list:") {
        Some(path) => Subsequence::parse_list(&fs::read_to_string(path)?),
        None => Subsequence::parse(spec),
    }
}

fn cmd_dyadic(n: usize, p_list: &str, tau_spec: &str, window: f64) -> Result<u8> {
    let ps = parse_p_list(p_list)?;
    let tau = parse_tau(tau_spec)?;
    if n < 2 {
        return Err(Error::domain("--N must be at least 2"));
    }
    if n > MAX_DYADIC_N {
        return Err(Error::Resource(format!("--N {n} exceeds the guard {MAX_DYADIC_N}")));
    }
    let last = tau.apply(n)?;
    let cfg = DyadicConfig::for_max_index(last)?;
    let seq = EventSequence::Dyadic(DyadicSequence::new(cfg));

    let mut out = std::io::stdout().lock();
    writeln!(out, "# dyadic sequence, resolution {} ({} atoms), tau = {tau_spec}", cfg.resolution(), cfg.atoms())?;
    writeln!(out, "n\tp\tmoment\trhs\tstep_a\tstep_b\tmonotone\tstep_c")?;
    let mut checkpoints: Vec<usize> =
        std::iter::successors(Some(2usize), |k| k.checked_mul(2)).take_while(|&k| k < n).collect();
    checkpoints.push(n);
    let mut all_pass = true;
    for &k in &checkpoints {
        for p in &ps {
            let r = dyadic::verify_ce1_chain(&cfg, &tau, k, p)?;
            all_pass &= r.passed();
            let flag = |b: bool| if b { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{k}\t{p}\t{:.12}\t{:.12}\t{}\t{}\t{}\t{}",
                r.moment_value,
                r.rhs,
                flag(r.step_a),
                flag(r.step_b),
                flag(r.monotone),
                flag(r.step_c)
            )?;
        }
    }

    let grid = default_p_grid();
    let ms = ms_estimate(&seq, &tau, n, window, &grid)?;
    writeln!(out, "# MS scan over n in [{}, {}]", ms.window.0, ms.window.1)?;
    writeln!(out, "p\tpowered\targmax\tmoment")?;
    for pt in &ms.curve {
        let powered = if pt.exact {
            format!("{} {}", fmt_exact(&pt.powered), fmt_decimal(&pt.powered, 12))
        } else {
            format!("{:.12}", pt.powered_value)
        };
        writeln!(out, "{}\t{powered}\t{}\t{:.12}", pt.p, pt.powered_argmax, pt.moment_value)?;
    }
    writeln!(out, "ms_sup\t{:.12}\tat p = {}", ms.sup, ms.sup_p)?;
    writeln!(out, "ms_limit_form\t{:.12}\tat p = {}", ms.limit_form, ms.limit_p)?;
    writeln!(out, "chain\t{}", if all_pass { "PASS" } else { "FAIL" })?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_search(cfg: SearchConfig, includes: &[PathBuf], out_dir: &Path) -> Result<u8> {
    cfg.validate()?;
    let included = includes.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
    let outcome = search::search_with_includes(&cfg, &included)?;

    fs::create_dir_all(out_dir)?;
    let mut summary = String::new();
    summary.push_str(search::SUMMARY_HEADER);
    summary.push('\n');
    for (k, hit) in outcome.hits.iter().enumerate() {
        let rank = k + 1;
        let text = search::hit_file(rank, hit);
        // written hits must reproduce their bounds
        let reparsed = parse_space(&text)?;
        if bcbounds::gk_bound(&reparsed)? != hit.gk || bcbounds::kat_bound(&reparsed)?.0 != hit.kat {
            return Err(Error::domain(format!("hit {rank} does not re-verify after serialization")));
        }
        fs::write(out_dir.join(format!("hit_{rank}.space")), text)?;
        summary.push_str(&search::summary_row(rank, hit));
        summary.push('\n');
    }
    fs::write(out_dir.join("summary.tsv"), &summary)?;

    let mut out = std::io::stdout().lock();
    let s = outcome.stats;
    writeln!(
        out,
        "# evaluated {}; kat > gk: {}; gk > kat: {}; ties: {}",
        s.evaluated, s.kat_above_gk, s.gk_above_kat, s.ties
    )?;
    for (i, path) in includes.iter().enumerate() {
        writeln!(out, "# include:{i} = {}", path.display())?;
    }
    out.write_all(summary.as_bytes())?;
    Ok(0)
}
