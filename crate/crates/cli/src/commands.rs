//! One function per subcommand: resolved configuration in, files out.

use std::fmt;
use std::io;

use contperc::components::{giant_stats, label_components};
use contperc::estimators::{
    check_duality, crossing_curve, estimate_lambda_c, estimate_p_c, estimate_theta, finite_size_experiment,
    fkg_pair_check, haux_experiment, isolated_square_probe, locality_curve, run_replicates,
    second_largest_scaling, CircuitTrial, Criterion, FiniteSizeCriterion, FkgPair, IsolatedSquareOptions,
    MCConfig, SearchRange, ThresholdResult, Transform,
};
use contperc::geometry::{Point, Rect, SquareAnnulus};
use contperc::graph::{build_percolated, ConnectionFunction, ModelParams};
use contperc::lattice::{
    dual_config, estimate_connect_decay, k_component, max_disjoint_crossings, sample_lattice_bonds,
    write_lattice_dump, Disjointness, HAuxConfig, LatticeBox,
};
use contperc::planar::CircuitMode;
use contperc::points::{fmt17, sample_ppp};
use contperc::rng::SeedSpec;

use crate::config::{ConfigError, Resolved};
use crate::output::{emit_plot_data, num, opt_num, quote, PlotPoint, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(contperc::Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(contperc::Error::Diagnostic(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<contperc::Error> for CliError {
    fn from(e: contperc::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CmdResult = Result<Outcome, CliError>;

/// Files produced by a command, plus an optional diagnostic failure.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub seeds: Vec<u64>,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.file(name, s);
        Ok(())
    }

    fn fail_if(&mut self, cond: bool, msg: impl Into<String>) {
        if cond && self.diagnostic.is_none() {
            self.diagnostic = Some(msg.into());
        }
    }
}

fn mc(c: &Resolved) -> Result<MCConfig, CliError> {
    let replicates = c.u64("reps")?;
    if replicates == 0 {
        return Err(CliError::Config("'reps' must be >= 1".into()));
    }
    let confidence = c.f64("confidence")?;
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(CliError::Config("'confidence' must lie in (0,1)".into()));
    }
    Ok(MCConfig { replicates, seed: c.u64("seed")?, confidence, parallel: None })
}

pub fn run(c: &Resolved) -> CmdResult {
    match c.command {
        "sample" => sample(c),
        "components" => components(c),
        "crossing" => crossing(c),
        "circuit" => circuit(c),
        "theta" => theta(c),
        "scaling" => scaling(c),
        "threshold" => threshold(c),
        "duality" => duality(c),
        "locality" => locality(c),
        "lattice" => lattice(c),
        "haux" => haux(c),
        "fkg" => fkg(c),
        "criterion" => criterion(c),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}

fn sample(c: &Resolved) -> CmdResult {
    let lambda = c.non_negative("lambda")?;
    let area = c.positive("area")?;
    let seed = c.u64("seed")?;
    let ps = sample_ppp(lambda, &Rect::square(area.sqrt())?, &SeedSpec::new(seed))?;
    let mut out = Outcome { seeds: vec![seed], ..Default::default() };
    let mut t = Table::new(&["x", "y"]);
    for p in &ps.points {
        t.push(vec![fmt17(p.x), fmt17(p.y)]);
    }
    out.file("points.csv", t.render());
    out.json("points.json", &ps.sidecar())?;
    Ok(out)
}

fn components(c: &Resolved) -> CmdResult {
    let lambda = c.positive("lambda")?;
    let p = c.prob("p")?;
    let seed = c.u64("seed")?;
    let mut out = Outcome { seeds: vec![seed], ..Default::default() };
    match c.str("mode")? {
        "summary" => {
            let mc = mc(c)?;
            let params = ModelParams::new(lambda, p)?;
            let cf = ConnectionFunction::constant(p)?;
            let mut t = Table::new(&[
                "replicate", "n", "lambda", "p", "L1", "L2", "theta_hat", "num_components", "max_diameter",
            ]);
            for n in c.schedule("n")? {
                let rows = run_replicates(&mc, &format!("components-{n}"), |_, s| {
                    let pts = sample_ppp(lambda, &Rect::square(n.sqrt())?, &s.named("points"))?;
                    let g = build_percolated(pts, &cf, &s.named("bonds"));
                    giant_stats(&label_components(&g), &g, &params, n)
                })?;
                for (r, st) in rows.iter().enumerate() {
                    t.push(vec![
                        r.to_string(),
                        num(n),
                        num(lambda),
                        num(p),
                        st.l1.to_string(),
                        st.l2.to_string(),
                        opt_num(st.theta_hat),
                        st.num_components.to_string(),
                        num(st.max_diameter()),
                    ]);
                }
            }
            out.file("components.csv", t.render());
        }
        "isolated" => {
            let ns = c.schedule("n")?;
            let [n] = ns[..] else {
                return Err(CliError::Config("isolated mode takes a single 'n'".into()));
            };
            let opts = IsolatedSquareOptions { c: c.non_negative("c")?, side: c.opt_f64("side")?, confidence: c.f64("confidence")? };
            let rep = isolated_square_probe(lambda, p, n, &SeedSpec::new(seed), &opts)?;
            let mut t = Table::new(&[
                "n", "side", "squares", "collar_empty", "collar_p_hat", "collar_ci_lo", "collar_ci_hi", "collar_exact",
                "predicted_lower", "qualifying",
            ]);
            t.push(vec![
                num(n),
                num(rep.side),
                rep.squares.to_string(),
                rep.collar_empty.successes.to_string(),
                num(rep.collar_empty.p_hat),
                num(rep.collar_empty.ci_lo),
                num(rep.collar_empty.ci_hi),
                num(rep.collar_exact),
                num(rep.predicted_lower),
                rep.qualifying.to_string(),
            ]);
            out.file("isolated.csv", t.render());
            out.json("isolated.json", &rep)?;
        }
        m => return Err(CliError::Config(format!("unknown components mode '{m}'"))),
    }
    Ok(out)
}

fn event_table() -> Table {
    Table::new(&["event", "param_json", "R", "replicates", "successes", "p_hat", "ci_lo", "ci_hi"])
}

fn crossing(c: &Resolved) -> CmdResult {
    let (lambda, p, kappa) = (c.non_negative("lambda")?, c.prob("p")?, c.positive("kappa")?);
    let mc = mc(c)?;
    let rows = crossing_curve(lambda, p, kappa, &c.schedule("R")?, &mc)?;
    let param = serde_json::json!({"lambda": lambda, "p": p, "kappa": kappa}).to_string();
    let mut t = event_table();
    let mut plot = Vec::new();
    for r in &rows {
        let e = r.estimate;
        t.push(vec![
            "crossing".into(),
            quote(&param),
            num(r.r),
            e.replicates.to_string(),
            e.successes.to_string(),
            num(e.p_hat),
            num(e.ci_lo),
            num(e.ci_hi),
        ]);
        plot.push(PlotPoint::new(format!("lambda={lambda},p={p}"), r.r, e.p_hat, Some((e.ci_lo, e.ci_hi))));
    }
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("events.csv", t.render());
    out.file("plot.csv", emit_plot_data(&plot));
    Ok(out)
}

fn circuit(c: &Resolved) -> CmdResult {
    let (lambda, p) = (c.non_negative("lambda")?, c.prob("p")?);
    let (r_in, r_out) = (c.non_negative("r_in")?, c.positive("r_out")?);
    let mode = match c.str("circuit_mode")? {
        "surrounding" => CircuitMode::Surrounding,
        "any_cycle" => CircuitMode::AnyCycle,
        m => return Err(CliError::Config(format!("unknown circuit mode '{m}'"))),
    };
    let mc = mc(c)?;
    let annulus = SquareAnnulus::new(Point::new(0.0, 0.0), r_in, r_out)?;
    let e = CircuitTrial { lambda, p, annulus, mode }.estimate(&mc, "circuit")?;
    let param = serde_json::json!({"lambda": lambda, "p": p, "r_in": r_in, "r_out": r_out, "mode": mode}).to_string();
    let mut t = event_table();
    t.push(vec![
        "circuit".into(),
        quote(&param),
        num(r_in),
        e.replicates.to_string(),
        e.successes.to_string(),
        num(e.p_hat),
        num(e.ci_lo),
        num(e.ci_hi),
    ]);
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("events.csv", t.render());
    Ok(out)
}

fn theta(c: &Resolved) -> CmdResult {
    let (lambda, p) = (c.positive("lambda")?, c.prob("p")?);
    let mc = mc(c)?;
    let tab = estimate_theta(lambda, p, &c.schedule("n")?, &mc)?;
    let mut t = Table::new(&["n", "replicates", "mean", "sd", "ci_lo", "ci_hi"]);
    let mut plot = Vec::new();
    for r in &tab.rows {
        t.push(vec![num(r.n), r.replicates.to_string(), num(r.mean), num(r.sd), num(r.ci_lo), num(r.ci_hi)]);
        plot.push(PlotPoint::new("theta_hat", r.n, r.mean, Some((r.ci_lo, r.ci_hi))));
        plot.push(PlotPoint::new("sd", r.n, r.sd, None));
    }
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("theta.csv", t.render());
    out.file("plot.csv", emit_plot_data(&plot));
    out.json("theta.json", &tab)?;
    out.fail_if(tab.subcritical, "largest component is not macroscopic (subcritical parameters)");
    Ok(out)
}

fn scaling(c: &Resolved) -> CmdResult {
    let (lambda, p) = (c.positive("lambda")?, c.prob("p")?);
    let mc = mc(c)?;
    let fit = second_largest_scaling(lambda, p, &c.schedule("n")?, &mc)?;
    let mut t = Table::new(&["n", "replicates", "mean_L2", "sd_L2", "mean_theta", "ratio"]);
    let mut plot = Vec::new();
    for r in &fit.rows {
        t.push(vec![
            num(r.n),
            r.replicates.to_string(),
            num(r.mean_l2),
            num(r.sd_l2),
            num(r.mean_theta),
            num(r.ratio),
        ]);
        let x = r.n.ln().powi(2);
        let se = r.sd_l2 / (r.replicates as f64).sqrt();
        plot.push(PlotPoint::new("mean_L2", x, r.mean_l2, Some((r.mean_l2 - 2.0 * se, r.mean_l2 + 2.0 * se))));
        if let (Some(a), Some(b)) = (fit.slope, fit.intercept) {
            plot.push(PlotPoint::new("fit", x, b + a * x, None));
        }
    }
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("scaling.csv", t.render());
    out.file("plot.csv", emit_plot_data(&plot));
    out.json("fit.json", &fit)?;
    out.fail_if(fit.subcritical, "second-largest scaling requested on subcritical parameters");
    Ok(out)
}

fn criterion_from(c: &Resolved, doubling: bool) -> Result<Criterion, CliError> {
    let level = c.f64("level")?;
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Config("'level' must lie in (0,1)".into()));
    }
    Ok(Criterion { r: c.positive("R")?, aspect: c.positive("aspect")?, level, transform: Transform::None, doubling })
}

fn probe_table(results: &[&ThresholdResult]) -> Table {
    let mut t = Table::new(&["parameter", "fixed", "param", "replicates", "successes", "p_hat", "ci_lo", "ci_hi", "passes"]);
    for res in results {
        for p in &res.probes {
            t.push(vec![
                res.parameter.clone(),
                num(res.fixed),
                num(p.param),
                p.estimate.replicates.to_string(),
                p.estimate.successes.to_string(),
                num(p.estimate.p_hat),
                num(p.estimate.ci_lo),
                num(p.estimate.ci_hi),
                p.passes.to_string(),
            ]);
        }
    }
    t
}

fn unstable(res: &ThresholdResult) -> bool {
    res.r_doubling.is_some_and(|d| !d.stable)
}

fn threshold(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let crit = criterion_from(c, c.bool("doubling")?)?;
    let res = match c.str("mode")? {
        "lambda_c" => {
            let p = c.prob("p")?;
            let range = SearchRange::new(0.0, c.positive("lambda_max")?, c.opt_f64("resolution")?.unwrap_or(0.1))?;
            estimate_lambda_c(p, &crit, &range, &mc)?
        }
        "p_c" => {
            let lambda = c.positive("lambda")?;
            let range = SearchRange::new(0.0, 1.0, c.opt_f64("resolution")?.unwrap_or(1.0 / 128.0))?;
            estimate_p_c(lambda, &crit, &range, &mc)?
        }
        m => return Err(CliError::Config(format!("unknown threshold mode '{m}'"))),
    };
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("probes.csv", probe_table(&[&res]).render());
    out.json("threshold.json", &res)?;
    out.fail_if(unstable(&res), "estimate not stable under halving R");
    Ok(out)
}

fn duality(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let lambda = c.positive("lambda")?;
    let crit = criterion_from(c, c.bool("doubling")?)?;
    let p_range = SearchRange::new(0.0, 1.0, c.positive("p_resolution")?)?;
    let l_range = SearchRange::new(0.0, c.positive("lambda_max")?, c.positive("lambda_resolution")?)?;
    let rep = check_duality(lambda, &crit, &p_range, &l_range, &mc)?;
    let mut all = vec![&rep.p_c];
    all.extend(rep.lambda_c.iter());
    all.extend(rep.lambda_c_at_p_lo.iter());
    all.extend(rep.lambda_c_at_p_hi.iter());
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("probes.csv", probe_table(&all).render());
    out.json("duality.json", &rep)?;
    out.fail_if(unstable(&rep.p_c) || rep.lambda_c.as_ref().is_some_and(unstable), "estimate not stable under halving R");
    Ok(out)
}

fn locality(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let lambda = c.positive("lambda")?;
    let levels: Vec<Transform> = match c.str("transform")? {
        "degree_truncate" => c.int_schedule("levels")?.into_iter().map(Transform::DegreeTruncate).collect(),
        "distance_thin" => c.schedule("levels")?.into_iter().map(Transform::DistanceThin).collect(),
        m => return Err(CliError::Config(format!("unknown transform '{m}'"))),
    };
    let crit = criterion_from(c, false)?;
    let p_range = SearchRange::new(0.0, 1.0, c.positive("p_resolution")?)?;
    let tab = locality_curve(lambda, &crit, &levels, &p_range, &mc)?;
    let mut t = Table::new(&["transform", "level", "estimate", "bracket_lo", "bracket_hi", "gap", "boundary"]);
    let mut plot = Vec::new();
    let mut row = |name: &str, level: String, r: &ThresholdResult, gap: f64| {
        t.push(vec![
            name.to_string(),
            level,
            num(r.estimate),
            num(r.bracket.0),
            num(r.bracket.1),
            num(gap),
            r.boundary.map(|b| format!("{b:?}").to_lowercase()).unwrap_or_default(),
        ]);
    };
    row("none", String::new(), &tab.base, 0.0);
    for r in &tab.rows {
        let (name, level) = match r.transform {
            Transform::DegreeTruncate(k) => ("degree_truncate", k as f64),
            Transform::DistanceThin(e) => ("distance_thin", e),
            _ => unreachable!("only the two locality transforms are configurable"),
        };
        row(name, num(level), &r.result, r.gap);
        plot.push(PlotPoint::new(name, level, r.result.estimate, Some(r.result.bracket)));
    }
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("locality.csv", t.render());
    out.file("plot.csv", emit_plot_data(&plot));
    out.json("locality.json", &tab)?;
    out.fail_if(tab.monotone == Some(false), "p_c not monotone along transform levels");
    Ok(out)
}

fn lattice(c: &Resolved) -> CmdResult {
    let seed = c.u64("seed")?;
    let q = c.prob("q")?;
    let mut out = Outcome { seeds: vec![seed], ..Default::default() };
    match c.str("mode")? {
        "sample" => {
            let lbox = LatticeBox::new(c.usize("width")?, c.usize("height")?)?;
            let cfg = sample_lattice_bonds(lbox, q, &SeedSpec::new(seed))?;
            let (x, y, k) = (c.usize("x")?, c.usize("y")?, c.usize("k")?);
            let comp = k_component(&cfg, (x, y), k)?;
            let mut dump = Vec::new();
            write_lattice_dump(&mut dump, &cfg, Some(seed))?;
            out.file("lattice.txt", String::from_utf8(dump).expect("ascii dump"));
            let mut t = Table::new(&[
                "width", "height", "q", "open_fraction", "lr_crossing", "dual_tb_crossing", "max_disjoint_edge",
                "max_disjoint_vertex", "k", "k_component_size",
            ]);
            t.push(vec![
                lbox.width.to_string(),
                lbox.height.to_string(),
                num(q),
                num(cfg.open_fraction()),
                cfg.has_lr_crossing().to_string(),
                dual_config(&cfg).has_tb_crossing().to_string(),
                max_disjoint_crossings(&cfg, Disjointness::Edge).to_string(),
                max_disjoint_crossings(&cfg, Disjointness::Vertex).to_string(),
                k.to_string(),
                comp.len().to_string(),
            ]);
            out.file("lattice.csv", t.render());
        }
        "decay" => {
            let ds = c.int_schedule("distances")?;
            let fit = estimate_connect_decay(q, &ds, c.u64("reps")?, &SeedSpec::new(seed))?;
            let mut t = Table::new(&["distance", "replicates", "successes", "p_hat"]);
            let mut plot = Vec::new();
            for r in &fit.rows {
                t.push(vec![r.distance.to_string(), r.replicates.to_string(), r.successes.to_string(), num(r.p_hat)]);
                plot.push(PlotPoint::new("p_hat", r.distance as f64, r.p_hat, None));
            }
            out.file("decay.csv", t.render());
            out.file("plot.csv", emit_plot_data(&plot));
            out.json("decay.json", &fit)?;
        }
        m => return Err(CliError::Config(format!("unknown lattice mode '{m}'"))),
    }
    Ok(out)
}

fn haux(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let r = c.usize("R")?;
    let squares = c.usize("squares")?;
    let cfg = HAuxConfig {
        lambda_prime: c.non_negative("lambda_prime")?,
        lambda: c.non_negative("lambda")?,
        p: c.prob("p")?,
        r,
        window: Rect::square((r * squares) as f64)?,
        n_inner: c.usize("n_inner")?,
        k_circuits: c.usize("K")?,
    };
    let rep = haux_experiment(&cfg, &mc)?;
    let mut t = Table::new(&[
        "R", "replicates", "admissible_p_hat", "admissible_ci_lo", "admissible_ci_hi", "edge_p_hat", "edge_ci_lo",
        "edge_ci_hi", "inconsistent", "giant_split",
    ]);
    t.push(vec![
        r.to_string(),
        mc.replicates.to_string(),
        num(rep.admissible.p_hat),
        num(rep.admissible.ci_lo),
        num(rep.admissible.ci_hi),
        num(rep.edge_open.p_hat),
        num(rep.edge_open.ci_lo),
        num(rep.edge_open.ci_hi),
        rep.inconsistent.to_string(),
        rep.giant_split.to_string(),
    ]);
    let mut cov = Table::new(&["min_distance", "max_distance", "pairs", "cov", "se", "within_3sigma"]);
    for ct in &rep.covariance {
        cov.push(vec![
            ct.min_distance.to_string(),
            ct.max_distance.map(|d| d.to_string()).unwrap_or_default(),
            ct.pairs.to_string(),
            num(ct.cov),
            num(ct.se),
            ct.within_3sigma.to_string(),
        ]);
    }
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("haux.csv", t.render());
    out.file("covariance.csv", cov.render());
    out.fail_if(rep.inconsistent > 0 || rep.giant_split > 0, "H_aux consistency violated");
    Ok(out)
}

fn fkg(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let (lambda, p, side) = (c.non_negative("lambda")?, c.prob("p")?, c.positive("side")?);
    let mut t = Table::new(&["pair", "replicates", "p_a", "p_b", "p_ab", "diff", "ci_lo", "ci_hi", "violation"]);
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    for name in c.words("pairs")? {
        let pair = match name.as_str() {
            "same" => FkgPair::Same,
            "parallel_crossings" => FkgPair::ParallelCrossings,
            "crossing_and_count" => FkgPair::CrossingAndCount,
            other => return Err(CliError::Config(format!("unknown event pair '{other}'"))),
        };
        let r = fkg_pair_check(pair, lambda, p, side, &mc)?;
        t.push(vec![
            name.clone(),
            r.replicates.to_string(),
            num(r.p_a),
            num(r.p_b),
            num(r.p_ab),
            num(r.diff),
            num(r.ci_lo),
            num(r.ci_hi),
            r.violation.to_string(),
        ]);
        out.fail_if(r.violation, format!("negative correlation for '{name}'"));
    }
    out.file("fkg.csv", t.render());
    Ok(out)
}

fn criterion(c: &Resolved) -> CmdResult {
    let mc = mc(c)?;
    let (lambda, p, m) = (c.positive("lambda")?, c.prob("p")?, c.positive("m")?);
    let theta_hat = match c.opt_f64("theta")? {
        Some(t) => t,
        None => {
            let theta_mc = MCConfig { replicates: c.u64("theta_reps")?.max(1), ..mc.clone() };
            let tab = estimate_theta(lambda, p, &[c.positive("theta_n")?], &theta_mc)?;
            tab.rows[0].mean
        }
    };
    let crit = FiniteSizeCriterion::new(m, theta_hat, lambda, p)?;
    let rep = finite_size_experiment(&crit, &mc)?;
    let mut t = Table::new(&[
        "m", "theta_hat", "second_max", "quarter_min", "replicates", "a_q", "a_pair", "a_pair_ci_lo", "a_pair_ci_hi",
        "violations",
    ]);
    t.push(vec![
        num(m),
        num(theta_hat),
        num(crit.second_max),
        num(crit.quarter_min),
        mc.replicates.to_string(),
        num(rep.a_q.p_hat),
        num(rep.a_pair.p_hat),
        num(rep.a_pair.ci_lo),
        num(rep.a_pair.ci_hi),
        rep.violations.to_string(),
    ]);
    let mut out = Outcome { seeds: vec![mc.seed], ..Default::default() };
    out.file("criterion.csv", t.render());
    out.fail_if(rep.violations > 0, "largest components of adjacent squares not connected");
    Ok(out)
}
