use std::path::{Path, PathBuf};
use std::str::FromStr;

use qi_core::bounds::{bhattacharyya_from_pair, chernoff_from_pair, OverlapPair};
use qi_core::fock::{OracleRow, TwoModeOracle};
use qi_core::states::{analytic_agreement, cc3, rho_cov, sigma_cov, solve_cq3, three_mode_cov};
use qi_core::symplectic::{is_pure, log_negativity, symplectic_eigenvalues};
use qi_core::{
    bhattacharyya_bound, chernoff_bound, coherent_qb, find_crossover, Bipartition,
    ExponentComparison, IlluminationModel, IlluminationScenario, QiError,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, CommonArgs, Format, OracleArgs, Spacing, StateArgs, StateKind, SweepArgs,
    SweepParam,
};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::report::{Cell, RunReport};
use crate::svg::{render, LinePlot};

const DEFAULT_NS: f64 = 0.01;
const DEFAULT_NB: f64 = 100.0;
const DEFAULT_KAPPA: f64 = 0.01;
const DEFAULT_CUTOFF: usize = 30;
const DEFAULT_S: [f64; 3] = [0.25, 0.5, 0.75];

/// Fully resolved shared settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub model: IlluminationModel,
    pub model_given: bool,
    pub n_s: f64,
    pub n_b: f64,
    pub kappa: f64,
    pub copies: u64,
    pub c: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub config: ConfigFile,
    pub threads: Option<usize>,
    pub seed: Option<String>,
}

fn env_var(key: &str) -> Option<String> {
    std::env::var(key).ok().filter(|v| !v.trim().is_empty())
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let config = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let model_text = config.pick(args.model.clone(), "model")?;
        let model = match &model_text {
            Some(m) => IlluminationModel::from_str(m)?,
            None => IlluminationModel::ThreeMode,
        };
        let copies = match args.copies {
            Some(v) => v,
            None => match config.raw("copies") {
                Some(raw) => crate::args::parse_copies(raw)
                    .map_err(|e| CliError::invalid(format!("config key copies: {e}")))?,
                None => 1,
            },
        };
        let threads = match env_var("QI_THREADS") {
            Some(raw) => match raw.trim().parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => {
                    return Err(CliError::invalid(format!(
                        "QI_THREADS must be a positive integer, got {raw:?}"
                    )))
                }
            },
            None => None,
        };
        let settings = Self {
            model,
            model_given: model_text.is_some(),
            n_s: config.pick(args.ns, "ns")?.unwrap_or(DEFAULT_NS),
            n_b: config.pick(args.nb, "nb")?.unwrap_or(DEFAULT_NB),
            kappa: config.pick(args.kappa, "kappa")?.unwrap_or(DEFAULT_KAPPA),
            copies,
            c: config.pick(args.c, "c")?,
            format: config.pick(args.format, "format")?.unwrap_or(Format::Csv),
            out: config.pick(args.out.clone(), "out")?,
            plot: config.pick(args.plot.clone(), "plot")?,
            config,
            threads,
            seed: env_var("QI_SEED"),
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), CliError> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(CliError::invalid(format!(
                    "{name} must be finite and >= 0, got {v}"
                )))
            }
        };
        nonneg("ns", self.n_s)?;
        nonneg("nb", self.n_b)?;
        nonneg("c", self.c.unwrap_or(0.0))?;
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(CliError::invalid(format!(
                "kappa must lie in [0, 1], got {}",
                self.kappa
            )));
        }
        if self.copies == 0 {
            return Err(CliError::invalid("copies must be at least 1"));
        }
        Ok(())
    }

    fn echo(&self) -> Value {
        json!({
            "model": self.model.name(),
            "ns": self.n_s,
            "nb": self.n_b,
            "kappa": self.kappa,
            "copies": self.copies,
            "c": self.c,
            "format": match self.format { Format::Csv => "csv", Format::Json => "json" },
            "out": self.out.as_ref().map(|p| p.display().to_string()),
            "plot": self.plot.as_ref().map(|p| p.display().to_string()),
            "config": self.config.path().map(|p| p.display().to_string()),
            "threads": self.threads,
            "seed": self.seed,
        })
    }

    fn scenario(&self, model: IlluminationModel) -> Result<IlluminationScenario, CliError> {
        let c = match model {
            IlluminationModel::Coherent => 0.0,
            _ => self
                .c
                .unwrap_or_else(|| model.default_correlation(self.n_s)),
        };
        Ok(IlluminationScenario::new(
            self.n_s,
            self.n_b,
            self.kappa,
            self.copies,
            c,
        )?)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            let available = std::thread::available_parallelism().map_or(1, |v| v.get());
            builder = builder.num_threads(n.min(available));
        }
        builder
            .build()
            .map_err(|e| CliError::invalid(format!("cannot start worker threads: {e}")))
    }

    fn reject_plot(&self, command: &str) -> Result<(), CliError> {
        match self.plot {
            Some(_) => Err(CliError::invalid(format!(
                "--plot is not supported by {command}"
            ))),
            None => Ok(()),
        }
    }
}

/// Runs one command. Returns a one-line human summary for the error stream.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let settings = Settings::resolve(&cli.common)?;
    let (report, summary) = match &cli.command {
        Command::Bounds => {
            settings.reject_plot("bounds")?;
            bounds(&settings)?
        }
        Command::Sweep(args) => sweep(&settings, args)?,
        Command::Crossover => crossover(&settings)?,
        Command::StateInfo(args) => {
            settings.reject_plot("state-info")?;
            state_info(&settings, args)?
        }
        Command::OracleCheck(args) => {
            settings.reject_plot("oracle-check")?;
            oracle_check(&settings, args)?
        }
    };
    emit(&settings, &report)?;
    Ok(summary)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn emit(settings: &Settings, report: &RunReport) -> Result<(), CliError> {
    let text = match settings.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &settings.out {
        Some(path) => write_file(path, &text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn with_command(mut echo: Value, extra: Value) -> Value {
    if let (Some(map), Value::Object(more)) = (echo.as_object_mut(), extra) {
        map.extend(more);
    }
    echo
}

pub fn bounds(settings: &Settings) -> Result<(RunReport, String), CliError> {
    let model = settings.model;
    let scn = settings.scenario(model)?;
    let (a, b) = model.states(&scn)?;
    let pair = OverlapPair::new(&a, &b)?;
    let qb = bhattacharyya_from_pair(&pair, scn.copies)?;
    let qc = chernoff_from_pair(&pair, scn.copies)?;
    let coherent = coherent_qb(scn.n_s, scn.n_b, scn.kappa, scn.copies)?;
    let asymptotic = model.asymptotic_exponent(&scn);

    let mut report = RunReport::new(
        "bounds",
        settings.echo(),
        &[
            "model",
            "n_s",
            "n_b",
            "kappa",
            "copies",
            "c",
            "p_qb",
            "p_qc",
            "s_opt",
            "exponent_qb",
            "exponent_qc",
            "asymptotic",
            "exponent_vs_coherent",
        ],
    );
    report.push(
        vec![
            model.name().into(),
            scn.n_s.into(),
            scn.n_b.into(),
            scn.kappa.into(),
            scn.copies.into(),
            scn.c.into(),
            qb.value.into(),
            qc.value.into(),
            qc.s_used.into(),
            qb.exponent_per_copy().into(),
            qc.exponent_per_copy().into(),
            asymptotic.into(),
            ratio_or_nan(qb.exponent_per_copy(), coherent.exponent_per_copy()).into(),
        ],
        None,
    );
    report.summarize("bhattacharyya", qb);
    report.summarize("chernoff", qc);
    report.summarize("coherent_bhattacharyya", coherent);
    let summary = format!(
        "{model}: P_QB = {:.6e}, P_QC = {:.6e} at s = {:.4}, exponent {:.6e} per copy (asymptotic {:.6e})",
        qb.value,
        qc.value,
        qc.s_used,
        qb.exponent_per_copy(),
        asymptotic
    );
    Ok((report, summary))
}

fn ratio_or_nan(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extra {
    #[serde(rename = "qb2")]
    Qb2,
    #[serde(rename = "qb3")]
    Qb3,
    #[serde(rename = "qbCoherent")]
    QbCoherent,
    #[serde(rename = "chernoff3")]
    Chernoff3,
}

impl Extra {
    pub fn name(self) -> &'static str {
        match self {
            Extra::Qb2 => "qb2",
            Extra::Qb3 => "qb3",
            Extra::QbCoherent => "qbCoherent",
            Extra::Chernoff3 => "chernoff3",
        }
    }
}

impl FromStr for Extra {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "qb2" => Ok(Extra::Qb2),
            "qb3" => Ok(Extra::Qb3),
            "qbCoherent" => Ok(Extra::QbCoherent),
            "chernoff3" => Ok(Extra::Chernoff3),
            other => Err(CliError::invalid(format!(
                "unknown sweep output {other:?} (expected qb2, qb3, qbCoherent or chernoff3)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub extras: Vec<Extra>,
}

impl SweepSpec {
    pub fn resolve(args: &SweepArgs, config: &ConfigFile) -> Result<Self, CliError> {
        let extras_text = config.pick(args.extras.clone(), "extras")?;
        let mut extras = Vec::new();
        for item in extras_text.iter().flat_map(|t| t.split(',')) {
            let item = item.trim();
            if item.is_empty() || ["gamma2", "gamma3", "ratio"].contains(&item) {
                continue;
            }
            let e: Extra = item.parse()?;
            if !extras.contains(&e) {
                extras.push(e);
            }
        }
        let spec = Self {
            param: config.pick(args.param, "param")?.unwrap_or(SweepParam::NS),
            start: config.pick(args.start, "start")?.unwrap_or(0.01),
            stop: config.pick(args.stop, "stop")?.unwrap_or(1.0),
            count: config.pick(args.count, "count")?.unwrap_or(100),
            spacing: config
                .pick(args.spacing, "spacing")?
                .unwrap_or(Spacing::Log),
            extras,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::invalid("sweep count must be at least 2"));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::invalid(format!(
                "sweep needs start < stop, got {} and {}",
                self.start, self.stop
            )));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err(CliError::invalid("log spacing needs start > 0"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == last {
                    return self.stop;
                }
                let t = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => {
                        let (a, b) = (self.start.log10(), self.stop.log10());
                        10f64.powf(a + (b - a) * t)
                    }
                }
            })
            .collect()
    }

    fn param_column(&self) -> Option<&'static str> {
        match self.param {
            SweepParam::NS => None,
            SweepParam::NB => Some("n_b"),
            SweepParam::Kappa => Some("kappa"),
            SweepParam::M => Some("copies"),
        }
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec!["n_s", "gamma2", "gamma3", "ratio"];
        cols.extend(self.param_column());
        cols.extend(self.extras.iter().map(|e| e.name()));
        cols
    }
}

fn copies_from(x: f64) -> Result<u64, CliError> {
    let m = x.round();
    if m >= 1.0 && m <= u64::MAX as f64 {
        Ok(m as u64)
    } else {
        Err(CliError::invalid(format!(
            "copies must be at least 1, got {x}"
        )))
    }
}

fn sweep_point(
    settings: &Settings,
    spec: &SweepSpec,
    x: f64,
) -> Result<(Vec<Cell>, Option<String>), CliError> {
    let mut base = settings.clone();
    match spec.param {
        SweepParam::NS => base.n_s = x,
        SweepParam::NB => base.n_b = x,
        SweepParam::Kappa => base.kappa = x,
        SweepParam::M => base.copies = copies_from(x)?,
    }
    let cmp = ExponentComparison::at(base.n_s)?;
    let mut row: Vec<Cell> = vec![
        cmp.n_s.into(),
        cmp.gamma2.into(),
        cmp.gamma3.into(),
        cmp.ratio.into(),
    ];
    match spec.param {
        SweepParam::NS => {}
        SweepParam::M => row.push(base.copies.into()),
        _ => row.push(x.into()),
    }
    let mut notes = Vec::new();
    for extra in &spec.extras {
        let value = match extra {
            Extra::Qb2 => {
                let scn =
                    IlluminationScenario::two_mode(base.n_s, base.n_b, base.kappa, base.copies)?;
                let (a, b) = IlluminationModel::TwoMode.states(&scn)?;
                bhattacharyya_bound(&a, &b, scn.copies)?.value
            }
            Extra::Qb3 => {
                let scn = base.scenario(IlluminationModel::ThreeMode)?;
                let (a, b) = IlluminationModel::ThreeMode.states(&scn)?;
                bhattacharyya_bound(&a, &b, scn.copies)?.value
            }
            Extra::QbCoherent => coherent_qb(base.n_s, base.n_b, base.kappa, base.copies)?.value,
            Extra::Chernoff3 => {
                let scn = base.scenario(IlluminationModel::ThreeMode)?;
                let (a, b) = IlluminationModel::ThreeMode.states(&scn)?;
                let qc = chernoff_bound(&a, &b, scn.copies)?;
                notes.push(format!("chernoff3 s = {:.6}", qc.s_used));
                qc.value
            }
        };
        row.push(value.into());
    }
    let note = (!notes.is_empty()).then(|| notes.join("; "));
    Ok((row, note))
}

pub fn sweep(settings: &Settings, args: &SweepArgs) -> Result<(RunReport, String), CliError> {
    let spec = SweepSpec::resolve(args, &settings.config)?;
    if settings.plot.is_some() && spec.param != SweepParam::NS {
        return Err(CliError::invalid(
            "--plot draws the ratio against N_S and needs --param nS",
        ));
    }
    let grid = spec.grid();
    let pool = settings.pool()?;
    let rows: Vec<(Vec<Cell>, Option<String>)> = pool.install(|| {
        grid.par_iter()
            .map(|&x| sweep_point(settings, &spec, x))
            .collect::<Result<_, _>>()
    })?;

    let echo = with_command(settings.echo(), json!({ "sweep": spec }));
    let mut report = RunReport::new("sweep", echo, &spec.columns());
    for (row, note) in rows {
        report.push(row, note);
    }
    let crossover = find_crossover()?;
    report.summarize("crossover", crossover);
    let sign_changes = count_sign_changes(&report);
    report.summarize("ratio_sign_changes", sign_changes);

    if let Some(path) = &settings.plot {
        let points: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| match (&r[0], &r[3]) {
                (Cell::Float(x), Cell::Float(y)) => (*x, *y),
                (Cell::Float(x), _) => (*x, f64::NAN),
                _ => (f64::NAN, f64::NAN),
            })
            .collect();
        write_file(
            path,
            &ratio_plot(points, spec.spacing == Spacing::Log, crossover),
        )?;
    }
    let summary = format!(
        "sweep over {} points of {:?}; crossover N_S* = {crossover:.6}",
        spec.count, spec.param
    );
    Ok((report, summary))
}

fn count_sign_changes(report: &RunReport) -> usize {
    let signs: Vec<bool> = report
        .rows
        .iter()
        .filter_map(|r| match r[3] {
            Cell::Float(v) => Some(v > 1.0),
            _ => None,
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn ratio_plot(points: Vec<(f64, f64)>, log_x: bool, crossover: f64) -> String {
    render(&LinePlot {
        title: "Three-mode over two-mode exponent".into(),
        x_label: "N_S".into(),
        y_label: "gamma3 / gamma2".into(),
        points,
        log_x,
        hline: Some(1.0),
        vline: Some(crossover),
    })
}

pub fn crossover(settings: &Settings) -> Result<(RunReport, String), CliError> {
    let n = find_crossover()?;
    let cmp = ExponentComparison::at(n)?;
    let residual = cmp.gamma3 - cmp.gamma2;
    let mut report = RunReport::new(
        "crossover",
        settings.echo(),
        &["n_s_star", "gamma2", "gamma3", "residual"],
    );
    report.push(
        vec![
            n.into(),
            cmp.gamma2.into(),
            cmp.gamma3.into(),
            residual.into(),
        ],
        None,
    );
    report.summarize("n_s_star_6dp", format!("{n:.6}"));
    if let Some(path) = &settings.plot {
        let spec = SweepSpec {
            param: SweepParam::NS,
            start: 0.01,
            stop: 1.0,
            count: 100,
            spacing: Spacing::Log,
            extras: Vec::new(),
        };
        let points = spec
            .grid()
            .into_iter()
            .map(|x| {
                (
                    x,
                    ExponentComparison::at(x).map_or(f64::NAN, |c| c.ratio.unwrap_or(f64::NAN)),
                )
            })
            .collect();
        write_file(path, &ratio_plot(points, true, n))?;
    }
    Ok((
        report,
        format!("crossover N_S* = {n:.6} (residual {residual:.1e})"),
    ))
}

fn mode_names(kind: StateKind) -> [&'static str; 3] {
    match kind {
        StateKind::Initial3 => ["S", "I1", "I2"],
        StateKind::Rho | StateKind::Sigma => ["R", "I1", "I2"],
    }
}

pub fn state_info(settings: &Settings, args: &StateArgs) -> Result<(RunReport, String), CliError> {
    if settings.model_given && settings.model != IlluminationModel::ThreeMode {
        return Err(CliError::invalid(
            "state-info describes the three-mode states; use --model three-mode",
        ));
    }
    let kind = settings
        .config
        .pick(args.state, "state")?
        .unwrap_or(StateKind::Initial3);
    let scn = settings.scenario(IlluminationModel::ThreeMode)?;
    let cov = match kind {
        StateKind::Initial3 => three_mode_cov(scn.n_s, scn.c)?,
        StateKind::Rho => rho_cov(&scn)?,
        StateKind::Sigma => sigma_cov(&scn)?,
    };
    let nu = symplectic_eigenvalues(&cov)?;
    let min_nu = nu.iter().cloned().fold(f64::INFINITY, f64::min);
    let pure = is_pure(&cov)?;
    let names = mode_names(kind);

    let echo = with_command(settings.echo(), json!({ "state": kind }));
    let mut report = RunReport::new("state-info", echo, &["quantity", "index", "value"]);
    let mut put = |q: &str, idx: String, v: Cell, note: Option<String>| {
        report.push(vec![q.into(), idx.into(), v], note)
    };
    for i in 0..cov.dim() {
        for j in 0..cov.dim() {
            put("cov", format!("{i}:{j}"), cov[(i, j)].into(), None);
        }
    }
    for (k, v) in nu.iter().enumerate() {
        put("nu", k.to_string(), (*v).into(), None);
    }
    put("min_nu", String::new(), min_nu.into(), None);
    put("determinant", String::new(), cov.determinant().into(), None);
    put("bona_fide", String::new(), cov.is_bona_fide().into(), None);
    put("pure", String::new(), pure.into(), None);
    put("c", String::new(), scn.c.into(), None);
    put("cq3", String::new(), solve_cq3(scn.n_s).into(), None);
    put("cc3", String::new(), cc3(scn.n_s).into(), None);
    for m in 0..3 {
        let part = Bipartition::new([m], 3)?;
        let others: Vec<&str> = (0..3).filter(|&o| o != m).map(|o| names[o]).collect();
        let label = format!("{}|{}", names[m], others.join("+"));
        put(
            "log_negativity",
            label,
            log_negativity(&cov, &part)?.into(),
            None,
        );
    }
    if kind != StateKind::Initial3 {
        match analytic_agreement(&scn) {
            Ok(g) => {
                put("analytic_nu_gap", String::new(), g.nu_gap.into(), None);
                put(
                    "analytic_reconstruction",
                    String::new(),
                    g.analytic_reconstruction.into(),
                    None,
                );
                put("mu_identity", String::new(), g.mu_identity.into(), None);
            }
            Err(QiError::AnalyticDomain(why)) => {
                put(
                    "analytic_nu_gap",
                    String::new(),
                    Cell::Empty,
                    Some(format!(
                        "closed form unavailable ({why}); numeric decomposition used"
                    )),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    let summary = format!(
        "{kind:?}: nu = [{}], bona fide {}, pure {pure}",
        nu.iter()
            .map(|v| format!("{v:.6}"))
            .collect::<Vec<_>>()
            .join(", "),
        cov.is_bona_fide()
    );
    Ok((report, summary))
}

fn parse_s_list(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let s: f64 = item
            .parse()
            .map_err(|_| CliError::invalid(format!("not a number in the s list: {item:?}")))?;
        if !(0.0..=1.0).contains(&s) {
            return Err(CliError::invalid(format!("s must lie in [0, 1], got {s}")));
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(CliError::invalid("the s list is empty"));
    }
    Ok(out)
}

pub fn oracle_check(
    settings: &Settings,
    args: &OracleArgs,
) -> Result<(RunReport, String), CliError> {
    if settings.model_given && settings.model != IlluminationModel::TwoMode {
        return Err(CliError::invalid(
            "the Fock oracle covers the two-mode scenario only",
        ));
    }
    if settings.c.is_some() {
        return Err(CliError::invalid(
            "oracle-check always uses the TMSV correlation; drop --c",
        ));
    }
    let cutoff = settings
        .config
        .pick(args.cutoff, "cutoff")?
        .unwrap_or(DEFAULT_CUTOFF);
    let s_grid = match settings.config.pick(args.s.clone(), "s")? {
        Some(t) => parse_s_list(&t)?,
        None => DEFAULT_S.to_vec(),
    };
    let scn = IlluminationScenario::two_mode(settings.n_s, settings.n_b, settings.kappa, 1)?;
    let (a, b) = IlluminationModel::TwoMode.states(&scn)?;
    let pair = OverlapPair::new(&a, &b)?;
    let oracle = TwoModeOracle::new(scn.n_s, scn.n_b, scn.kappa, cutoff)?;
    let tail = oracle.tail_bound();

    let echo = with_command(
        settings.echo(),
        json!({ "model": "two-mode", "cutoff": cutoff, "s": s_grid }),
    );
    let mut report = RunReport::new(
        "oracle-check",
        echo,
        &[
            "s",
            "gaussian",
            "oracle",
            "relative_gap",
            "tail_bound",
            "flagged",
        ],
    );
    let mut worst = 0.0f64;
    for &s in &s_grid {
        let row = OracleRow::new(s, pair.evaluate(s)?.q, oracle.q_s(s)?, tail);
        worst = worst.max(row.relative_gap);
        report.push(
            vec![
                row.s.into(),
                row.gaussian.into(),
                row.oracle.into(),
                row.relative_gap.into(),
                row.tail_bound.into(),
                row.flagged.into(),
            ],
            row.flagged
                .then(|| "gap exceeds 10x the truncation budget".to_string()),
        );
    }
    let helstrom = oracle.helstrom()?;
    let qc = chernoff_from_pair(&pair, 1)?;
    let qb = bhattacharyya_from_pair(&pair, 1)?;
    let slack = 10.0 * tail;
    let ordered = helstrom <= qc.value + slack && qc.value <= qb.value + slack;
    report.summarize("helstrom", helstrom);
    report.summarize("chernoff", qc.value);
    report.summarize("bhattacharyya", qb.value);
    report.summarize("bound_order_holds", ordered);
    report.summarize("tail_bound", tail);
    report.summarize("max_relative_gap", worst);
    let summary = format!(
        "cutoff {cutoff}: max relative gap {worst:.2e}, tail bound {tail:.1e}; Helstrom {helstrom:.6} <= Chernoff {:.6} <= Bhattacharyya {:.6}: {ordered}",
        qc.value, qb.value
    );
    Ok((report, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(spacing: Spacing) -> SweepSpec {
        SweepSpec {
            param: SweepParam::NS,
            start: 0.01,
            stop: 1.0,
            count: 5,
            spacing,
            extras: vec![],
        }
    }

    #[test]
    fn grids_hit_their_ends() {
        let g = spec(Spacing::Log).grid();
        assert_eq!(g.len(), 5);
        assert_eq!((g[0], g[4]), (0.01, 1.0));
        assert!((g[2] - 0.1).abs() < 1e-15);
        let g = spec(Spacing::Linear).grid();
        assert!((g[1] - 0.2575).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(Spacing::Log);
        s.count = 1;
        assert!(s.validate().is_err());
        let mut s = spec(Spacing::Log);
        s.start = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec(Spacing::Linear);
        s.start = 0.0;
        assert!(s.validate().is_ok());
        s.stop = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn columns_follow_spec_order() {
        let mut s = spec(Spacing::Log);
        s.extras = vec![Extra::Chernoff3, Extra::Qb2];
        assert_eq!(
            s.columns(),
            ["n_s", "gamma2", "gamma3", "ratio", "chernoff3", "qb2"]
        );
        s.param = SweepParam::NB;
        assert_eq!(s.columns()[4], "n_b");
    }

    #[test]
    fn s_list() {
        assert_eq!(
            parse_s_list("0.25, 0.5,0.75").unwrap(),
            vec![0.25, 0.5, 0.75]
        );
        assert!(parse_s_list("0.5,2").is_err());
        assert!(parse_s_list("").is_err());
    }
}
