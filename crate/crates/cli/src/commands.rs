use cascade_core::effective::{closed_form_coherences, effective_steady_state, reduce};
use cascade_core::liouvillian::{chain_steady_state, DensityMatrix, GroundCoherences};
use cascade_core::rates::{rate_ratio, resonant_amplitude, transition_amplitude, MAX_DETUNED_ORDER};
use cascade_core::rb85::truncated_peaks;
use cascade_core::spectrum::{coherence_peaks, height_ratios, loglinear_fit, HeightRatios, LogLinearFit, PeakSet};
use cascade_core::units::{angular_to_mhz, mhz_to_angular};
use cascade_core::Error;
use serde::Serialize;

use crate::config::{RunConfig, Sweep};
use crate::error::CliError;
use crate::output::{Cell, Sink, Table};
use crate::sweep::run_points;

pub const ZERO_FUNDAMENTAL: &str = "zero_fundamental";

/// Peak data in MHz with the derived quantities reported alongside it.
#[derive(Debug, Serialize)]
struct Analysis {
    peaks: PeakSet,
    ratios: Option<HeightRatios>,
    fit: Option<LogLinearFit>,
    visible: usize,
    threshold: f64,
    flags: Vec<&'static str>,
}

fn analyze(peaks: &PeakSet, threshold: f64) -> Result<Analysis, CliError> {
    let mut flags = Vec::new();
    let ratios = match height_ratios(peaks) {
        Ok(r) => Some(r),
        Err(Error::ZeroFundamental) => {
            flags.push(ZERO_FUNDAMENTAL);
            None
        }
        Err(e) => return Err(e.into()),
    };
    let fit = match ratios.as_ref().map(loglinear_fit) {
        Some(Ok(fit)) => Some(fit),
        Some(Err(Error::TooFewPeaks(_))) | None => None,
        Some(Err(e)) => return Err(e.into()),
    };
    let mut in_mhz = peaks.clone();
    in_mhz.delta_omega_s = angular_to_mhz(peaks.delta_omega_s);
    for p in &mut in_mhz.peaks {
        p.frequency = angular_to_mhz(p.frequency);
    }
    Ok(Analysis {
        visible: peaks.visible(threshold).len(),
        peaks: in_mhz,
        ratios,
        fit,
        threshold,
        flags,
    })
}

fn peak_table(a: &Analysis) -> Table {
    let mut t = Table::new(["n", "frequency_mhz", "weight", "ratio_to_fundamental"]);
    for (k, p) in a.peaks.peaks.iter().enumerate() {
        let ratio = a.ratios.as_ref().map(|r| r.ratios[k]);
        t.push(vec![p.n.into(), p.frequency.into(), p.weight.into(), ratio.into()]);
    }
    t
}

fn summary_line(label: &str, a: &Analysis) -> String {
    let mut s = format!(
        "{label}: {} peaks, {} visible above {:e}",
        a.peaks.peaks.len(),
        a.visible,
        a.threshold
    );
    if let Some(fit) = &a.fit {
        s += &format!(", log-linear slope {:.4} (r² {:.4})", fit.slope, fit.r_squared);
    }
    for f in &a.flags {
        s += &format!(" [{f}]");
    }
    s
}

#[derive(Serialize)]
struct SteadyReport<'a> {
    config_hash: &'a str,
    config: &'a RunConfig,
    model: &'static str,
    labels: Vec<usize>,
    rho_re: Vec<Vec<f64>>,
    rho_im: Vec<Vec<f64>>,
    #[serde(flatten)]
    analysis: &'a Analysis,
}

pub fn steady(cfg: &RunConfig, sink: &mut Sink, effective: bool) -> Result<(), CliError> {
    let params = cfg.system_params()?;
    let (rho, ground, labels): (DensityMatrix, GroundCoherences, Vec<usize>) = if effective {
        let rho = effective_steady_state(&reduce(&params)?)?;
        let ground = rho.as_ground();
        let labels = (0..params.n_ground()).map(|k| 2 * k + 1).collect();
        (rho, ground, labels)
    } else {
        let rho = chain_steady_state(&params)?;
        let ground = rho.chain_ground_block()?;
        (rho, ground, (1..=params.n_levels()).collect())
    };
    let analysis = analyze(&coherence_peaks(&ground, params.delta_omega_s())?, cfg.threshold)?;

    let m = rho.matrix();
    let mut rho_table = Table::new(["m", "m_prime", "re", "im"]);
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            rho_table.push(vec![(*li).into(), (*lj).into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
        }
    }
    sink.csv("steady_rho", &rho_table)?;
    sink.csv("steady_peaks", &peak_table(&analysis))?;
    let n = labels.len();
    let report = SteadyReport {
        config_hash: &sink.config_hash.clone(),
        config: cfg,
        model: if effective { "effective" } else { "full" },
        rho_re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
        rho_im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        labels,
        analysis: &analysis,
    };
    sink.json("steady", &report)?;
    println!("{}", summary_line(report.model, &analysis));
    Ok(())
}

/// Fundamental weight and `H_{n,1}` for `n = 2..`, `None` when undriven.
fn weight_columns(weights: &[f64]) -> (f64, Vec<Option<f64>>) {
    let w1 = weights[0];
    let ratios = weights[1..]
        .iter()
        .map(|w| (w1 > 0.0).then(|| w / w1))
        .collect();
    (w1, ratios)
}

fn model_header(prefix: &str, n_ground: usize) -> Vec<String> {
    let mut h = vec![format!("{prefix}_w1")];
    h.extend((2..n_ground).map(|n| format!("{prefix}_H{n}_1")));
    h
}

fn push_model(row: &mut Vec<Cell>, weights: &[f64]) -> bool {
    let (w1, ratios) = weight_columns(weights);
    row.push(w1.into());
    row.extend(ratios.into_iter().map(Cell::from));
    w1 > 0.0
}

fn require_sweep(cfg: &RunConfig) -> Result<Sweep, CliError> {
    cfg.sweep.ok_or_else(|| {
        CliError::config("no sweep configured: set sweep_start, sweep_stop and sweep_count (or --start/--stop/--count)")
    })
}

#[derive(Serialize)]
struct SweepReport<'a> {
    config_hash: &'a str,
    config: &'a RunConfig,
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plateau: Option<Vec<Plateau>>,
}

#[derive(Serialize)]
struct Plateau {
    column: String,
    relative_drift: f64,
    saturated: bool,
}

/// Relative change across the last two sweep points below which a ratio
/// counts as saturated.
pub const PLATEAU_DRIFT: f64 = 1e-3;

fn cell_json(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Int(v) => (*v).into(),
        Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
        Cell::Text(t) if t.is_empty() => serde_json::Value::Null,
        Cell::Text(t) => t.clone().into(),
    }
}

fn emit_sweep(
    sink: &mut Sink,
    cfg: &RunConfig,
    stem: &str,
    table: &Table,
    plateau: Option<Vec<Plateau>>,
) -> Result<(), CliError> {
    sink.csv(stem, table)?;
    let report = SweepReport {
        config_hash: &sink.config_hash.clone(),
        config: cfg,
        columns: &table.header,
        rows: table.rows.iter().map(|r| r.iter().map(cell_json).collect()).collect(),
        plateau,
    };
    sink.json(stem, &report)
}

fn closed_weights(n_levels: usize, j: f64, gp: f64, delta: f64) -> Result<Vec<f64>, CliError> {
    let c = closed_form_coherences(n_levels, j, gp, delta)?;
    let n_ground = n_levels.div_ceil(2);
    Ok((1..n_ground)
        .map(|n| {
            (0..n_ground - n)
                .map(|k| c.get(2 * k + 1, 2 * (k + n) + 1).map_or(0.0, |z| z.norm_sqr()))
                .sum()
        })
        .collect())
}

fn full_and_effective(params: &cascade_core::level_system::SystemParams) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let dws = params.delta_omega_s();
    let full = coherence_peaks(&chain_steady_state(params)?.chain_ground_block()?, dws)?.weights();
    let eff = coherence_peaks(&effective_steady_state(&reduce(params)?)?.as_ground(), dws)?.weights();
    Ok((full, eff))
}

pub fn sweep_detuning(cfg: &RunConfig, sink: &mut Sink, parallel: usize) -> Result<(), CliError> {
    let sweep = require_sweep(cfg)?;
    let n = cfg.n_levels;
    let n_ground = n.div_ceil(2);
    let with_closed = matches!(n, 3 | 5 | 7);
    let mut header = vec!["delta_mhz".to_string()];
    header.extend(model_header("full", n_ground));
    header.extend(model_header("effective", n_ground));
    if with_closed {
        header.extend(model_header("closed", n_ground));
    }
    header.push("flag".into());

    let rows = run_points(&sweep.values(), parallel, |delta_mhz| {
        let delta = mhz_to_angular(delta_mhz);
        let detunings = cascade_core::level_system::alternating_detunings(n, delta);
        let params = cfg.system_params_with(cfg.rabi(), detunings)?;
        let (full, eff) = full_and_effective(&params)?;
        let mut row: Vec<Cell> = vec![delta_mhz.into()];
        let driven = push_model(&mut row, &full);
        push_model(&mut row, &eff);
        if with_closed {
            push_model(&mut row, &closed_weights(n, params.j_o(), params.gamma_prime(), delta)?);
        }
        row.push(if driven { "" } else { ZERO_FUNDAMENTAL }.into());
        Ok(row)
    })?;
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));
    emit_sweep(sink, cfg, "sweep_detuning", &table, None)?;
    println!("sweep-detuning: {} points, N = {n}", table.rows.len());
    Ok(())
}

pub fn sweep_rabi(cfg: &RunConfig, sink: &mut Sink, parallel: usize) -> Result<(), CliError> {
    let sweep = require_sweep(cfg)?;
    if sweep.start < 0.0 || sweep.stop < 0.0 {
        return Err(CliError::config("Ω/γ sweep endpoints must be non-negative"));
    }
    let n_ground = cfg.n_levels.div_ceil(2);
    let mut header = vec!["omega_over_gamma".to_string(), "j_o_over_gamma_prime".to_string()];
    header.extend(model_header("full", n_ground));
    header.extend(model_header("effective", n_ground));
    header.push("flag".into());

    let gamma = cfg.gamma();
    let rows = run_points(&sweep.values(), parallel, |ratio| {
        let params = cfg.system_params_with(ratio * gamma, cfg.detunings())?;
        let (full, eff) = full_and_effective(&params)?;
        let mut row: Vec<Cell> = vec![ratio.into(), (params.j_o() / params.gamma_prime()).into()];
        let driven = push_model(&mut row, &full);
        push_model(&mut row, &eff);
        row.push(if driven { "" } else { ZERO_FUNDAMENTAL }.into());
        Ok(row)
    })?;
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));

    let plateau = plateau_report(&table);
    for p in &plateau {
        println!(
            "{}: relative drift over the last step {:.3e} ({})",
            p.column,
            p.relative_drift,
            if p.saturated { "saturated" } else { "not saturated" }
        );
    }
    emit_sweep(sink, cfg, "sweep_rabi", &table, Some(plateau))?;
    println!("sweep-rabi: {} points, N = {}", table.rows.len(), cfg.n_levels);
    Ok(())
}

fn plateau_report(table: &Table) -> Vec<Plateau> {
    let rows = &table.rows;
    if rows.len() < 2 {
        return Vec::new();
    }
    let value = |row: &Vec<Cell>, k: usize| match row[k] {
        Cell::Float(v) => v,
        _ => f64::NAN,
    };
    table
        .header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("full_H"))
        .map(|(k, h)| {
            let last = value(&rows[rows.len() - 1], k);
            let prev = value(&rows[rows.len() - 2], k);
            let drift = ((last - prev) / last).abs();
            Plateau {
                column: h.clone(),
                relative_drift: drift,
                saturated: drift < PLATEAU_DRIFT,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct Rb85Report<'a> {
    config_hash: &'a str,
    config: &'a RunConfig,
    full: &'a Analysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<&'a Analysis>,
}

pub fn rb85(cfg: &RunConfig, sink: &mut Sink, truncated: bool) -> Result<(), CliError> {
    let params = cfg.rb85_params();
    let model = params.full_model()?;
    let rho = model.steady_state()?;
    let full = analyze(&model.peaks(&rho)?, cfg.threshold)?;
    sink.csv("rb85_peaks", &peak_table(&full))?;
    println!("{}", summary_line("16-state model", &full));
    let chain = if truncated {
        let a = analyze(&truncated_peaks(&params)?, cfg.threshold)?;
        sink.csv("rb85_truncated_peaks", &peak_table(&a))?;
        println!("{}", summary_line("13-level chain", &a));
        Some(a)
    } else {
        None
    };
    let report = Rb85Report {
        config_hash: &sink.config_hash.clone(),
        config: cfg,
        full: &full,
        truncated: chain.as_ref(),
    };
    sink.json("rb85", &report)
}

#[derive(Serialize)]
struct RateRow {
    n: usize,
    order_2n: usize,
    resonance_frequency_mhz: f64,
    resonant_amplitude: f64,
    ratio: f64,
    detuned_amplitude: Option<f64>,
    on_resonance: Option<bool>,
    support: &'static str,
}

pub fn rates(cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let params = cfg.system_params()?;
    let energies = params.rotating_energies();
    let max_n = (params.n_levels() - 1) / 2;
    let mut rows = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let detuned = if n <= MAX_DETUNED_ORDER {
            Some(transition_amplitude(&params, Some(&energies), n)?)
        } else {
            None
        };
        rows.push(RateRow {
            n,
            order_2n: 2 * n,
            resonance_frequency_mhz: angular_to_mhz(n as f64 * params.delta_omega_s()),
            resonant_amplitude: resonant_amplitude(&params, n)?,
            ratio: rate_ratio(&params, n)?,
            detuned_amplitude: detuned.map(|r| r.amplitude),
            on_resonance: detuned.map(|r| r.resonant),
            support: if detuned.is_some() { "detuned" } else { "resonant-only" },
        });
    }
    let mut table = Table::new([
        "n",
        "order_2n",
        "resonance_frequency_mhz",
        "resonant_amplitude",
        "ratio",
        "detuned_amplitude",
        "on_resonance",
        "support",
    ]);
    for r in &rows {
        let on = r.on_resonance.map_or(String::new(), |b| b.to_string());
        table.push(vec![
            r.n.into(),
            r.order_2n.into(),
            r.resonance_frequency_mhz.into(),
            r.resonant_amplitude.into(),
            r.ratio.into(),
            r.detuned_amplitude.into(),
            Cell::Text(on),
            r.support.into(),
        ]);
    }
    print!("{}", table.to_csv(&sink.config_hash));
    sink.csv("rates", &table)?;
    sink.json(
        "rates",
        &serde_json::json!({ "config_hash": sink.config_hash, "config": cfg, "rows": rows }),
    )
}
