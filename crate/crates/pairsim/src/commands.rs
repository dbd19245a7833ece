//! One function per subcommand. Each returns its tables and report; writing is separate.

use std::f64::consts::PI;

use pairsim_core::analysis::{
    bell_from_fringes, fit_sinusoid, visibility_net, visibility_threshold_check, FringeFit,
    Locality,
};
use pairsim_core::budget::{
    apply_improvements, available_pair_rate, fidelity_penalty_from_multipair,
    mean_pairs_per_window, rate_from_internal_probability, total_pair_loss, BrightnessSpec,
    Improvements, LossBudget,
};
use pairsim_core::events::{
    central_to_side_ratio, chsh_mc, fringe_scan_mc, histogram_coincidences, peak_reports,
    phase_scan_mc, simulate_run, FringeScan,
};
use pairsim_core::lock::{fidelity_under_lock, phase_sweep, run_lock};
use pairsim_core::polarization::{
    check_timescale_ordering, chsh_s, state_with_visibility, ChshSettings, Pol, TimescaleFailure,
};
use pairsim_core::spectral::{
    coherence_time, fwhm, half_max_crossings, pump_coherence_time, spdc_spectral_density,
    wavelength_to_frequency, FilterSpec, SpdcConfig,
};

use crate::config::{RunConfig, Sweep};
use crate::error::{config_err, CliError};
use crate::output::{num, read_table, Report, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub tables: Vec<Table>,
    pub report: Report,
}

fn resolved(cfg: &RunConfig) -> Result<RunConfig, CliError> {
    cfg.clone().resolve(None)
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), num)
}

/// Emission spectrum on a wavelength grid centered on degeneracy, per temperature.
pub fn spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let spdc = SpdcConfig::default();
    let s = &cfg.spectrum;
    let center = spdc.degenerate_wavelength();
    let grid: Vec<f64> = if s.points == 1 || s.span == 0.0 {
        vec![center]
    } else {
        (0..s.points)
            .map(|k| center - 0.5 * s.span + s.span * k as f64 / (s.points - 1) as f64)
            .collect()
    };
    let mut table = Table::new("spectrum", &["temperature_K", "wavelength_nm", "density"]);
    let mut report = Report::default();
    for (i, &t) in s.temperatures.iter().enumerate() {
        let density: Vec<f64> = grid
            .iter()
            .map(|&l| spdc_spectral_density(&spdc, t, wavelength_to_frequency(l)))
            .collect::<Result<_, _>>()?;
        for (l, d) in grid.iter().zip(&density) {
            table.push_nums(&[t, l * 1e9, *d]);
        }
        let peak = grid
            .iter()
            .zip(&density)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(l, _)| *l)
            .unwrap_or(center);
        report.num(format!("t{i}.temperature_K"), t);
        report.num(format!("t{i}.peak_wavelength_m"), peak);
        report.add(format!("t{i}.fwhm_m"), opt_num(fwhm(&grid, &density)));
        let fwhm_hz = half_max_crossings(&grid, &density)
            .map(|(lo, hi)| wavelength_to_frequency(lo) - wavelength_to_frequency(hi));
        report.add(format!("t{i}.fwhm_Hz"), opt_num(fwhm_hz));
    }
    Ok(Output {
        tables: vec![table],
        report,
    })
}

/// Start-stop histogram of one seeded run, with the three-peak report.
pub fn histogram(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let src = cfg.source()?;
    let det = cfg.detector_model()?;
    let run = simulate_run(&src, &[det, det], None)?;
    let bin = cfg.histogram.bin_width.unwrap_or_default();
    let span = cfg.histogram.span.unwrap_or_default();
    let hist = histogram_coincidences(&run.alice, &run.bob, bin, span)?;
    let peaks = peak_reports(&hist, src.mzi_delay);
    let (ratio, ratio_sigma) = central_to_side_ratio(&peaks);

    let mut table = Table::new("histogram", &["delay_s", "counts"]);
    for (c, n) in hist.bin_centers().iter().zip(&hist.counts) {
        table.push(vec![num(*c), n.to_string()]);
    }
    let mut report = Report::default();
    report.add("pairs_emitted", run.pairs_emitted);
    report.add("detections_alice", run.alice.len());
    report.add("detections_bob", run.bob.len());
    report.num("bin_width_s", bin);
    for (name, p) in ["minus", "center", "plus"].iter().zip(&peaks) {
        report.num(format!("peak_{name}.nominal_s"), p.nominal);
        report.num(format!("peak_{name}.position_s"), p.position);
        report.add(format!("peak_{name}.area"), p.area);
        report.add(format!("peak_{name}.fwhm_s"), opt_num(p.fwhm));
    }
    report.num("central_to_side_ratio", ratio);
    report.num("central_to_side_ratio_sigma", ratio_sigma);
    report.num("model_peak_fwhm_s", cfg.expected_peak_width()?);
    report.num(
        "model_envelope_fwhm_s",
        coherence_time(&src.filter, Pol::V)?,
    );
    Ok(Output {
        tables: vec![table],
        report,
    })
}

fn add_fit(report: &mut Report, prefix: &str, f: &FringeFit) {
    report.num(format!("{prefix}.visibility"), f.visibility);
    report.num(format!("{prefix}.sigma_v"), f.sigma_v);
    report.num(format!("{prefix}.phase_rad"), f.phase);
    report.num(format!("{prefix}.chi2_reduced"), f.chi2_reduced);
}

/// Nominal and realized phases read from a lock sweep table.
type PhaseColumns = (Vec<f64>, Vec<f64>);

fn parse_phases(cfg: &RunConfig) -> Result<Option<PhaseColumns>, CliError> {
    let Some(path) = &cfg.fringe.phases_from else {
        return Ok(None);
    };
    let rows = read_table(path)?;
    let mut x = Vec::new();
    let mut phases = Vec::new();
    for row in rows {
        let parse = |k: usize| -> Result<f64, CliError> {
            match row.get(k).map(|s| s.parse::<f64>()) {
                Some(Ok(v)) if v.is_finite() => Ok(v),
                _ => config_err(format!("{}: rows need two numeric columns", path.display())),
            }
        };
        x.push(parse(0)?);
        phases.push(parse(1)?);
    }
    Ok(Some((x, phases)))
}

/// Coincidence fringe over the interferometer phase or Bob's half-wave plate, with fits.
pub fn fringe(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let src = cfg.source()?;
    let det = cfg.detector_model()?;
    let window = cfg.coincidence_window.unwrap_or_default();
    let f = &cfg.fringe;
    let n = f.points;
    let (x, generated, scan, period, x_name): (Vec<f64>, Vec<f64>, FringeScan, f64, &str) =
        match (parse_phases(&cfg)?, f.sweep) {
            (Some((x, phases)), _) => {
                let scan = phase_scan_mc(&src, &[det, det], &phases, f.visibility, window)?;
                (x, phases, scan, 2.0 * PI, "phase_rad")
            }
            (None, Sweep::Phase) => {
                let x: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
                let scan = phase_scan_mc(&src, &[det, det], &x, f.visibility, window)?;
                (x.clone(), x, scan, 2.0 * PI, "phase_rad")
            }
            (None, Sweep::Hwp) => {
                let dial: Vec<f64> = (0..n).map(|k| 0.5 * PI * k as f64 / n as f64).collect();
                let pol: Vec<f64> = dial.iter().map(|d| 2.0 * d).collect();
                let state = state_with_visibility(cfg.phase, f.visibility)?;
                let scan =
                    fringe_scan_mc(&src, &[det, det], 2.0 * f.alice_hwp, &pol, &state, window)?;
                (dial, pol, scan, 0.5 * PI, "hwp_angle_rad")
            }
        };
    let gen_name = if f.sweep == Sweep::Hwp && f.phases_from.is_none() {
        "polarization_angle_rad"
    } else {
        "realized_phase_rad"
    };
    let mut table = Table::new("fringe", &[x_name, gen_name, "counts", "accidentals"]);
    for i in 0..x.len() {
        table.push(vec![
            num(x[i]),
            num(generated[i]),
            scan.counts[i].to_string(),
            scan.accidentals[i].to_string(),
        ]);
    }
    let raw: Vec<f64> = scan.counts.iter().map(|&c| c as f64).collect();
    let acc: Vec<f64> = scan.accidentals.iter().map(|&c| c as f64).collect();
    let fit_raw = fit_sinusoid(&x, &raw, period)?;
    let fit_net = visibility_net(&x, &raw, &acc, period)?;
    let mut report = Report::default();
    report.add(
        "sweep",
        if x_name == "phase_rad" {
            "phase"
        } else {
            "hwp"
        },
    );
    report.num("coincidence_window_s", window);
    report.add("pairs_emitted", scan.pairs_emitted.iter().sum::<u64>());
    add_fit(&mut report, "raw", &fit_raw);
    add_fit(&mut report, "net", &fit_net);
    let loc = match visibility_threshold_check(fit_net.visibility) {
        Locality::Local => "local",
        Locality::Nonlocal => "nonlocal",
    };
    report.add("net.locality", loc);
    Ok(Output {
        tables: vec![table],
        report,
    })
}

/// CHSH from sixteen simulated runs at the standard settings.
pub fn bell(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let src = cfg.source()?;
    let det = cfg.detector_model()?;
    let window = cfg.coincidence_window.unwrap_or_default();
    let state = state_with_visibility(cfg.phase, cfg.bell.visibility)?;
    let settings = ChshSettings::standard();
    let counts = chsh_mc(&src, &[det, det], &state, &settings, window)?;
    let result = bell_from_fringes(counts.e, counts.sigma)?;

    let mut table = Table::new(
        "bell",
        &[
            "analyzer_a_rad",
            "analyzer_b_rad",
            "n_pp",
            "n_pm",
            "n_mp",
            "n_mm",
            "correlation",
            "correlation_sigma",
        ],
    );
    for (s, (a, b)) in settings.pairs().into_iter().enumerate() {
        let mut row = vec![num(a), num(b)];
        row.extend(counts.counts[s].iter().map(u64::to_string));
        row.push(num(counts.e[s]));
        row.push(num(counts.sigma[s]));
        table.push(row);
    }
    let mut report = Report::default();
    report.num("s", result.s);
    report.num("sigma_s", result.sigma_s);
    report.num("n_sigma_violation", result.n_sigma_violation);
    report.num("s_analytic", chsh_s(&state, &settings));
    report.num("coincidence_window_s", window);
    Ok(Output {
        tables: vec![table],
        report,
    })
}

/// The three filter presets with their loss budgets.
pub fn budget_presets() -> [(&'static str, FilterSpec, LossBudget); 3] {
    [
        (
            "dwdm100ghz",
            FilterSpec::dwdm_100ghz(),
            LossBudget::dwdm_100ghz(),
        ),
        (
            "psfbg540mhz",
            FilterSpec::psfbg_540mhz(),
            LossBudget::psfbg_540mhz(),
        ),
        (
            "psfbg25mhz",
            FilterSpec::psfbg_25mhz(),
            LossBudget::psfbg_25mhz(),
        ),
    ]
}

/// Loss chain, available rate, pairs per coherence time and multi-pair penalty per preset.
pub fn budget(cfg: &RunConfig, improvements: Improvements) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let spec = BrightnessSpec::default();
    let mut summary = Table::new(
        "budget",
        &[
            "filter",
            "bandwidth_Hz",
            "total_loss_dB",
            "available_rate_per_s",
            "available_rate_per_s_mW",
            "coherence_time_s",
            "mu",
            "fidelity_penalty",
        ],
    );
    let mut chain = Table::new(
        "budget_chain",
        &["filter", "item", "loss_dB", "cumulative_dB"],
    );
    let mut report = Report::default();
    report.num("pump_power_mW", cfg.pump_power);
    for (name, on) in [
        ("flat_top_filter", improvements.flat_top_filter),
        ("spliced_fibers", improvements.spliced_fibers),
        ("tapered_waveguide", improvements.tapered_waveguide),
        ("cavity_splitting", improvements.cavity_splitting),
    ] {
        report.add(format!("improvement.{name}"), on);
    }
    for (name, filter, base) in budget_presets() {
        let (b, warnings) = apply_improvements(&base, improvements);
        let bw_mhz = filter.fwhm_v * 1e-6;
        let tau = coherence_time(&filter, Pol::V)?;
        let per_mw = available_pair_rate(&spec, bw_mhz, 1.0, &b);
        let mu = mean_pairs_per_window(&spec, bw_mhz, cfg.pump_power, tau);
        summary.push(vec![
            name.to_string(),
            num(filter.fwhm_v),
            num(total_pair_loss(&b)),
            num(per_mw * cfg.pump_power),
            num(per_mw),
            num(tau),
            num(mu),
            num(fidelity_penalty_from_multipair(mu)),
        ]);
        for (item, db, total) in b.chain() {
            chain.push(vec![
                name.to_string(),
                item.to_string(),
                num(db),
                num(total),
            ]);
        }
        report.num(format!("{name}.total_loss_dB"), total_pair_loss(&b));
        for w in warnings {
            report.add(
                format!("{name}.warning"),
                format!(
                    "{} reduced to zero ({} dB requested, {} dB available)",
                    w.item, w.requested_db, w.available_db
                ),
            );
        }
    }
    let internal = rate_from_internal_probability(&spec, cfg.pump_power);
    report.num(
        "internal.rate_from_probability_per_s",
        internal.from_internal_probability,
    );
    report.num(
        "internal.rate_from_brightness_per_s",
        internal.from_full_brightness,
    );
    report.num("internal.ratio", internal.ratio);
    report.add("internal.discrepancy", internal.discrepancy);
    Ok(Output {
        tables: vec![summary, chain],
        report,
    })
}

/// Closed- and open-loop runs of the phase lock, then a stepped set-phase sweep.
pub fn lock(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let ls = &cfg.lock;
    let (plant, lock, sim) = (ls.plant(), ls.lock(), ls.simulation(cfg.seed));
    let closed = run_lock(&plant, &lock, &sim)?;
    let open = run_lock(&plant, &lock.open_loop(), &sim)?;
    let targets = ls.sweep_targets();
    let steps = phase_sweep(
        &plant,
        &lock,
        &targets,
        ls.sweep_dwell,
        ls.settle_tolerance,
        ls.dt,
        cfg.seed,
    )?;

    let mut series = Table::new("lock", &["t_s", "phi_r_rad", "error_rad", "actuation_rad"]);
    for i in 0..closed.t.len() {
        series.push_nums(&[
            closed.t[i],
            closed.phi_r[i],
            closed.error[i],
            closed.actuation[i],
        ]);
    }
    let mut sweep = Table::new(
        "lock_sweep",
        &[
            "target_rad",
            "realized_rad",
            "settle_time_s",
            "final_error_rad",
        ],
    );
    for s in &steps {
        sweep.push(vec![
            num(s.target),
            num(s.final_phase),
            opt_num(s.settle_time),
            num(s.final_error),
        ]);
    }
    let mut report = Report::default();
    report.num("residual_rms_rad", closed.residual_rms);
    report.num("residual_max_rad", closed.residual_max);
    report.num("open_loop_rms_rad", open.residual_rms);
    report.num("fidelity_under_lock", fidelity_under_lock(&closed.residual));
    report.num("temperature_change_K", closed.temperature_change);
    report.add("unwinds", closed.unwinds.len());
    let settle: Vec<Option<f64>> = steps.iter().map(|s| s.settle_time).collect();
    report.add("sweep_all_settled", settle.iter().all(Option::is_some));
    report.add(
        "settle_time_max_s",
        opt_num(
            settle
                .iter()
                .copied()
                .collect::<Option<Vec<_>>>()
                .map(|v| v.into_iter().fold(0.0, f64::max)),
        ),
    );
    for w in &closed.warnings {
        report.add("warning", w);
    }
    Ok(Output {
        tables: vec![series, sweep],
        report,
    })
}

/// Timescale ordering: pump coherence >> interferometer delay >> photon coherence + jitter.
pub fn check(cfg: &RunConfig) -> Result<Output, CliError> {
    let cfg = resolved(cfg)?;
    let pump = pump_coherence_time(cfg.check.laser_linewidth)?;
    let photon = coherence_time(&cfg.filter_spec()?, Pol::V)?;
    let jitter = cfg.detector_model()?.jitter_fwhm;
    let r = check_timescale_ordering(
        pump.lorentzian,
        cfg.mzi_delay,
        photon,
        jitter,
        cfg.check.margin,
    );
    let mut report = Report::default();
    report.num("pump_coherence_time_s", pump.lorentzian);
    report.num("pump_coherence_time_angular_s", pump.angular);
    report.num("bin_delay_s", cfg.mzi_delay);
    report.num("photon_coherence_time_s", photon);
    report.num("detector_jitter_s", jitter);
    report.num("coherence_ratio", r.coherence_ratio);
    report.num("separation_ratio", r.separation_ratio);
    report.num("margin", r.margin);
    report.add("pass", r.pass);
    report.add(
        "first_failure",
        match r.first_failure {
            None => "none",
            Some(TimescaleFailure::PumpCoherence) => "pump_coherence",
            Some(TimescaleFailure::BinSeparation) => "bin_separation",
        },
    );
    Ok(Output {
        tables: Vec::new(),
        report,
    })
}
