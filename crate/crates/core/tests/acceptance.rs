//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 5 and 7 miss their thresholds; see `KNOWN_FAILURES`. The process
//! exits nonzero when any other criterion fails, when a known failure no
//! longer matches the independent reference values, or, with
//! `CASIMIR_ACCEPTANCE_STRICT=1`, on any FAIL.

use std::fmt::Write as _;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use casimir::dielectric::{
    drude_eps_imag_axis, drude_eps_real_axis, DrudeParams, ExtrapolationPolicy, OpticalSample, OpticalTable,
    TabulatedModel,
};
use casimir::drude_fit::{fit_drude, FitWindow, WeightPolicy};
use casimir::experiments::{residuals, shift_separations, ExperimentDataset, ForcePoint};
use casimir::lifshitz::{
    ideal_casimir_pressure, ideal_sphere_plate_force, pft_consistency_check, plate_pressure, sphere_plate_force,
    ForceJob, LayerStack, QuadratureSpec, ThermalSpec,
};
use casimir::output::fmt_num;
use casimir::presets;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Res<T> = std::result::Result<T, String>;

const R: f64 = 100e-6;
const NM: f64 = 1e-9;
const PN: f64 = 1e-12;

/// Criteria expected to fail, with the reason printed next to FAIL.
const KNOWN_FAILURES: &[(u8, &str)] = &[
    (5, "thermal correction is negative when the lossy-metal TE n = 0 term vanishes"),
    (7, "screening ratio 0.35 and a 2.3-2.4% change at 100 nm exceed the thresholds"),
];

/// Independent reference values (scipy quad, 400 Matsubara terms), tests/oracles/lifshitz_oracle.py.
mod reference {
    /// (a, Matsubara sum, zero-temperature integral) for homogeneous Au limit, N.
    pub const AU_SUM_VS_INTEGRAL: [(f64, f64, f64); 3] = [
        (100e-9, 1.391_842_331_921_914_5e-10, 1.415_612_780_608_049e-10),
        (200e-9, 2.229_227_220_446_581_7e-11, 2.318_128_235_381_453e-11),
        (300e-9, 7.204_640_072_343_207e-12, 7.664_953_509_129_03e-12),
    ];
    /// ΔF for +10% ω_p of the substrate and of the top layer, N.
    pub const SCREENING: (f64, f64) = (1.416_446_820_902_321_5e-12, 4.045_287_668_726_542e-12);
    /// Relative change for ±5% ω_p of homogeneous Au at 100 nm.
    pub const AU_5PCT_100NM: (f64, f64) = (0.023_134_895_078_095_63, -0.024_329_802_985_744_498);
    /// Agreement required between the library and the reference values.
    pub const REL_TOL: f64 = 1e-6;
}

struct Outcome {
    pass: bool,
    detail: String,
    /// Numeric results, compared bitwise between runs.
    body: String,
    /// Whether the numbers agree with the independent reference values.
    reference_ok: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String, body: String) -> Self {
        Outcome {
            pass,
            detail,
            body,
            reference_ok: true,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn row(body: &mut String, vals: &[f64]) {
    let cells: Vec<String> = vals.iter().map(|&v| fmt_num(v)).collect();
    let _ = writeln!(body, "{}", cells.join(","));
}

fn sphere_job(stack: LayerStack, thermal: ThermalSpec) -> ForceJob {
    ForceJob {
        stack,
        radius: Some(R),
        thermal,
        quad: quad(),
    }
}

fn material(name: &str) -> Res<DrudeParams> {
    presets::drude_material(name).ok_or_else(|| format!("unknown material {name}"))
}

fn ideal_limit() -> Res<Outcome> {
    let ideal = LayerStack::ideal_metal();
    let (mut worst, mut slowest) = (0.0f64, Duration::ZERO);
    let mut body = String::new();
    for a in [0.1e-6, 0.5e-6, 1e-6, 6e-6] {
        let t0 = Instant::now();
        let p = plate_pressure(&ideal, a, ThermalSpec::zero_temperature(), quad()).map_err(e)?;
        let radius = 1000.0 * a;
        let f = sphere_plate_force(&ideal, a, radius, ThermalSpec::zero_temperature(), quad()).map_err(e)?;
        slowest = slowest.max(t0.elapsed());
        let (pe, fe) = (ideal_casimir_pressure(a).map_err(e)?, ideal_sphere_plate_force(a, radius).map_err(e)?);
        worst = worst.max(rel(p.value, pe)).max(rel(f.value, fe));
        row(&mut body, &[a, p.value, f.value]);
    }
    let pass = worst < 1e-3 && slowest < Duration::from_secs(1);
    Ok(Outcome::new(
        pass,
        format!("max rel err {worst:.1e} (< 1e-3), slowest point {:.3} s (< 1 s)", slowest.as_secs_f64()),
        body,
    ))
}

fn kk_identity() -> Res<Outcome> {
    let t0 = Instant::now();
    let p = material("au-limit")?;
    let table = OpticalTable::sample_log_uniform(1e11, 1e19, 600, |w| drude_eps_real_axis(&p, w)).map_err(e)?;
    let model = TabulatedModel::new(table, ExtrapolationPolicy::DrudeTails).map_err(e)?;
    let mut worst = 0.0f64;
    let mut body = String::new();
    for k in 0..=40 {
        let z = 10f64.powf(13.0 + 0.1 * k as f64);
        let kk = model.eps_imag_axis(z).map_err(e)?;
        worst = worst.max(rel(kk, drude_eps_imag_axis(&p, z).map_err(e)?));
        row(&mut body, &[z, kk]);
    }
    let secs = t0.elapsed().as_secs_f64();
    Ok(Outcome::new(
        worst < 1e-4 && secs < 10.0,
        format!("max rel err {worst:.1e} over 41 points in [1e13, 1e17] (< 1e-4), {secs:.2} s (< 10 s)"),
        body,
    ))
}

fn pft() -> Res<Outcome> {
    let stacks = [
        ("Au", LayerStack::homogeneous(material("au-limit")?)),
        ("Al+Au/Pd", presets::stack("paper-upper-limit").map_err(e)?),
    ];
    let mut worst = 0.0f64;
    let mut body = String::new();
    for (_, s) in &stacks {
        for a in [100.0 * NM, 200.0 * NM, 500.0 * NM] {
            let c = pft_consistency_check(s, a, R, ThermalSpec::sum(300.0), quad()).map_err(e)?;
            worst = worst.max(c.rel_diff);
            row(&mut body, &[a, c.closed_form, c.integrated]);
        }
    }
    Ok(Outcome::new(worst < 1e-4, format!("max rel diff {worst:.1e} (< 1e-4)"), body))
}

fn layered_degeneracies() -> Res<Outcome> {
    let (al, aupd) = (material("al-limit")?, material("aupd-limit")?);
    let th = ThermalSpec::sum(300.0);
    let cases = [
        ("h -> 0", LayerStack::layered(aupd, 1e-30, al).map_err(e)?, LayerStack::homogeneous(al)),
        ("h -> inf", LayerStack::layered(aupd, 1.0, al).map_err(e)?, LayerStack::homogeneous(aupd)),
        ("eps1 = eps2", LayerStack::layered(al, 15.0 * NM, al).map_err(e)?, LayerStack::homogeneous(al)),
    ];
    let mut worst = 0.0f64;
    let mut body = String::new();
    for (_, layered, homogeneous) in &cases {
        for a in [100.0 * NM, 300.0 * NM] {
            let fl = sphere_plate_force(layered, a, R, th, quad()).map_err(e)?.value;
            let fh = sphere_plate_force(homogeneous, a, R, th, quad()).map_err(e)?.value;
            let pl = plate_pressure(layered, a, th, quad()).map_err(e)?.value;
            let ph = plate_pressure(homogeneous, a, th, quad()).map_err(e)?.value;
            worst = worst.max(rel(fl, fh)).max(rel(pl, ph));
            row(&mut body, &[a, fl, fh, pl, ph]);
        }
    }
    Ok(Outcome::new(worst < 1e-8, format!("max rel diff {worst:.1e} (< 1e-8)"), body))
}

fn sum_vs_integral() -> Res<Outcome> {
    let stack = presets::stack("paper-upper-limit-au").map_err(e)?;
    let sum = sphere_job(stack.clone(), ThermalSpec::sum(300.0));
    let int = sphere_job(stack, ThermalSpec::zero_temperature());
    let mut diffs = Vec::new();
    let mut reference_ok = true;
    let mut body = String::new();
    for &(a, ref_sum, ref_int) in &reference::AU_SUM_VS_INTEGRAL {
        let (fs, fi) = (sum.value(a).map_err(e)?, int.value(a).map_err(e)?);
        reference_ok &= rel(fs, ref_sum) < reference::REL_TOL && rel(fi, ref_int) < reference::REL_TOL;
        diffs.push(fs - fi);
        row(&mut body, &[a, fs, fi]);
    }
    let d100 = diffs[0];
    let positive = d100 > 0.0;
    let in_range = (1.0 * PN..=10.0 * PN).contains(&d100);
    // "increases as a decreases" read on the signed difference
    let increasing = diffs[0] > diffs[1] && diffs[1] > diffs[2];
    let mut out = Outcome::new(
        positive && in_range && increasing,
        format!(
            "dF(100, 200, 300 nm) = {:.3}, {:.3}, {:.3} pN; positive: {positive}, in [1, 10] pN: {in_range}, \
             increasing as a decreases: {increasing}; |dF| grows as a decreases: {}",
            diffs[0] / PN,
            diffs[1] / PN,
            diffs[2] / PN,
            diffs[0].abs() > diffs[1].abs() && diffs[1].abs() > diffs[2].abs(),
        ),
        body,
    );
    out.reference_ok = reference_ok;
    Ok(out)
}

fn top_layer_effect() -> Res<Outcome> {
    let th = ThermalSpec::sum(300.0);
    let coated = sphere_job(presets::stack("paper-upper-limit").map_err(e)?, th).value(100.0 * NM).map_err(e)?;
    let bare = sphere_job(LayerStack::homogeneous(material("al-limit")?), th).value(100.0 * NM).map_err(e)?;
    let change = (coated - bare).abs();
    let pass = (6.5 * PN..=26.0 * PN).contains(&change);
    let mut body = String::new();
    row(&mut body, &[coated, bare]);
    Ok(Outcome::new(
        pass,
        format!("|dF| = {:.2} pN at 100 nm (13 pN within a factor of 2)", change / PN),
        body,
    ))
}

fn sensitivity() -> Res<Outcome> {
    let th = ThermalSpec::sum(300.0);
    let (al, aupd) = (material("al-limit")?, material("aupd-limit")?);
    let h = presets::AUPD_THICKNESS;
    let a = 100.0 * NM;
    let force = |top: DrudeParams, sub: DrudeParams| -> Res<f64> {
        sphere_job(LayerStack::layered(top, h, sub).map_err(e)?, th).value(a).map_err(e)
    };
    let scaled = |p: DrudeParams, k: f64| p.with_omega_p(p.omega_p() * k).map_err(e);
    let base = force(aupd, al)?;
    let d_sub = force(aupd, scaled(al, 1.1)?)? - base;
    let d_top = force(scaled(aupd, 1.1)?, al)? - base;
    let ratio = d_sub.abs() / d_top.abs();
    let screening = ratio <= 1.0 / 3.0;
    let mut reference_ok =
        rel(d_sub, reference::SCREENING.0) < reference::REL_TOL && rel(d_top, reference::SCREENING.1) < reference::REL_TOL;

    let au = material("au-limit")?;
    let mut body = String::new();
    row(&mut body, &[base, d_sub, d_top]);
    let (mut worst, mut worst_a) = (0.0f64, 0.0);
    for i in 1..=9 {
        let a = 100.0 * NM * i as f64;
        let job = |p: DrudeParams| sphere_job(LayerStack::homogeneous(p), th).value(a).map_err(e);
        let f0 = job(au)?;
        let up = job(scaled(au, 1.05)?)? / f0 - 1.0;
        let down = job(scaled(au, 0.95)?)? / f0 - 1.0;
        if i == 1 {
            reference_ok &= rel(up, reference::AU_5PCT_100NM.0) < reference::REL_TOL && rel(down, reference::AU_5PCT_100NM.1) < reference::REL_TOL;
        }
        for v in [up.abs(), down.abs()] {
            if v > worst {
                (worst, worst_a) = (v, a);
            }
        }
        row(&mut body, &[a, f0, up, down]);
    }
    let au_ok = worst < 0.02;
    let mut out = Outcome::new(
        screening && au_ok,
        format!(
            "screening |dF_Al|/|dF_AuPd| = {:.2}/{:.2} pN = {ratio:.3} (<= 1/3: {screening}); \
             Au +-5% omega_p max change {:.2}% at {:.0} nm (< 2%: {au_ok})",
            d_sub.abs() / PN,
            d_top.abs() / PN,
            100.0 * worst,
            worst_a / NM,
        ),
        body,
    );
    out.reference_ok = reference_ok;
    Ok(out)
}

fn drude_fit_oracle() -> Res<Outcome> {
    let t0 = Instant::now();
    let mut body = String::new();
    let mut worst = 0.0f64;
    for (wp, wt) in [(1.372e16, 4.060e13), (2.235e16, 12.49e13)] {
        let p = DrudeParams::new(wp, wt).map_err(e)?;
        let t = OpticalTable::sample_log_uniform(3.8e13, 9.4e14, 50, |w| drude_eps_real_axis(&p, w)).map_err(e)?;
        let r = fit_drude(&t, FitWindow::default(), WeightPolicy::Uniform).map_err(e)?;
        worst = worst.max(rel(r.params.omega_p(), wp)).max(rel(r.params.omega_tau(), wt));
        row(&mut body, &[r.params.omega_p(), r.params.omega_tau()]);
    }

    let (wp, wt) = (1.372e16, 4.060e13);
    let p = DrudeParams::new(wp, wt).map_err(e)?;
    let clean = OpticalTable::sample_log_uniform(3.8e13, 9.4e14, 50, |w| drude_eps_real_axis(&p, w)).map_err(e)?;
    let noise = Normal::new(0.0, 0.01).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let trials = 200;
    let (mut hit_p, mut hit_t) = (0usize, 0usize);
    for _ in 0..trials {
        let noisy: Vec<OpticalSample> = clean
            .samples()
            .iter()
            .map(|s| OpticalSample {
                omega: s.omega,
                eps: Complex64::new(
                    s.eps.re * (1.0 + noise.sample(&mut rng)),
                    s.eps.im * (1.0 + noise.sample(&mut rng)),
                ),
            })
            .collect();
        let r = fit_drude(&OpticalTable::new(noisy).map_err(e)?, FitWindow::default(), WeightPolicy::Uniform)
            .map_err(e)?;
        hit_p += usize::from((r.params.omega_p() - wp).abs() <= 3.0 * r.sigma_omega_p);
        hit_t += usize::from((r.params.omega_tau() - wt).abs() <= 3.0 * r.sigma_omega_tau);
        row(&mut body, &[r.params.omega_p(), r.sigma_omega_p, r.params.omega_tau(), r.sigma_omega_tau]);
    }
    let secs = t0.elapsed().as_secs_f64();
    let coverage = hit_p.min(hit_t) as f64 / trials as f64;
    Ok(Outcome::new(
        worst < 1e-6 && coverage >= 0.95 && secs < 30.0,
        format!(
            "noiseless rel err {worst:.1e} (< 1e-6); 3-sigma coverage omega_p {hit_p}/{trials}, \
             omega_tau {hit_t}/{trials} (>= 95%); {secs:.2} s (< 30 s)"
        ),
        body,
    ))
}

fn residual_pipeline() -> Res<Outcome> {
    let job = sphere_job(presets::stack("paper-upper-limit").map_err(e)?, ThermalSpec::sum(300.0));
    let offset = 2.0 * PN;
    let seps: Vec<f64> = (0..17).map(|i| (100.0 + 50.0 * i as f64) * NM).collect();
    let points = seps
        .iter()
        .map(|&a| Ok(ForcePoint { a, force: job.value(a).map_err(e)? + offset, sigma: None }))
        .collect::<Res<Vec<_>>>()?;
    let ds = ExperimentDataset::new(points, "synthetic").map_err(e)?;
    let table = residuals(&ds, |a| job.value(a)).map_err(e)?;
    let worst = table.rows.iter().map(|r| rel(r.residual, offset)).fold(0.0, f64::max);

    let shift = 16.0 * NM;
    let shifted = shift_separations(&ds, shift);
    let exact = shifted.points().iter().zip(&seps).all(|(p, &a)| p.a == a + shift);
    let half = 8.0 * NM;
    let additive = shift_separations(&shift_separations(&ds, half), half).separations() == shifted.separations();
    let undone = shift_separations(&shifted, -shift).separations() == seps;
    let commutes = residuals(&shifted, |a| job.value(a))
        .map_err(e)?
        .rows
        .iter()
        .zip(ds.points())
        .all(|(r, p)| job.value(p.a + shift).is_ok_and(|m| r.f_model == m));

    let mut body = String::new();
    for r in &table.rows {
        row(&mut body, &[r.a, r.f_exp, r.f_model, r.residual]);
    }
    for a in shifted.separations() {
        row(&mut body, &[a]);
    }
    Ok(Outcome::new(
        worst <= 1e-12 && exact && additive && undone && commutes,
        format!(
            "offset recovered to {worst:.1e} rel (<= 1e-12); 16 nm shift exact: {exact}, 8+8 = 16 nm: {additive}, \
             reversible: {undone}, commutes with model: {commutes}"
        ),
        body,
    ))
}

type Criterion = fn() -> Res<Outcome>;

const CRITERIA: [(u8, &str, Criterion); 9] = [
    (1, "ideal Casimir limit", ideal_limit),
    (2, "dispersion relation vs Drude closed form", kk_identity),
    (3, "sphere-plate vs integrated plate pressure", pft),
    (4, "layered degeneracies", layered_degeneracies),
    (5, "Matsubara sum vs zero-temperature integral", sum_vs_integral),
    (6, "top-layer effect", top_layer_effect),
    (7, "sensitivity and screening", sensitivity),
    (8, "Drude fit oracle", drude_fit_oracle),
    (9, "residual pipeline", residual_pipeline),
];

fn run_all() -> Vec<(u8, &'static str, Res<Outcome>, f64)> {
    CRITERIA
        .iter()
        .map(|&(id, name, f)| {
            let t0 = Instant::now();
            let r = f();
            (id, name, r, t0.elapsed().as_secs_f64())
        })
        .collect()
}

fn cli_output(args: &[&str]) -> Res<Vec<u8>> {
    let out = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .env_remove("CASIMIR_OUTPUT_DIR")
        .output()
        .map_err(e)?;
    if !out.status.success() {
        return Err(format!("casimir {} exited with {}", args.join(" "), out.status));
    }
    Ok(out.stdout)
}

fn determinism(first: &[(u8, &'static str, Res<Outcome>, f64)]) -> Res<Outcome> {
    // Second pass on a single thread, so scheduling cannot hide behind identical pools.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(e)?;
    let second = pool.install(run_all);
    let mut mismatched = Vec::new();
    for ((id, _, a, _), (_, _, b, _)) in first.iter().zip(&second) {
        match (a, b) {
            (Ok(x), Ok(y)) if x.body == y.body => {}
            _ => mismatched.push(id.to_string()),
        }
    }
    let commands: [&[&str]; 3] = [
        &["force", "--preset", "paper-upper-limit", "--geometry", "sphere-plate", "--radius", "100um", "--a-min", "100nm", "--a-max", "900nm"],
        &["epsilon", "--material", "au-limit", "--zeta-min", "1e13", "--zeta-max", "1e17", "--points", "100"],
        &["sweep", "--preset", "paper-upper-limit", "--parameter", "top.omega_p", "--a", "100nm,200nm"],
    ];
    for cmd in commands {
        if cli_output(cmd)? != cli_output(cmd)? {
            mismatched.push(format!("cli {}", cmd[0]));
        }
    }
    Ok(Outcome::new(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "criteria 1-9 (multi- vs single-threaded) and 3 CLI commands byte-identical".into()
        } else {
            format!("differences in: {}", mismatched.join(", "))
        },
        String::new(),
    ))
}

fn main() -> ExitCode {
    let strict = std::env::var("CASIMIR_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    println!("acceptance suite");
    let first = run_all();
    let t0 = Instant::now();
    let tenth = determinism(&first);
    let tenth_secs = t0.elapsed().as_secs_f64();

    let mut unexpected = Vec::new();
    let mut any_fail = false;
    let results = first
        .iter()
        .map(|(id, name, r, s)| (*id, *name, r.as_ref().map_err(Clone::clone), *s))
        .chain(std::iter::once((10, "determinism", tenth.as_ref().map_err(Clone::clone), tenth_secs)));
    for (id, name, r, secs) in results {
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == id).map(|k| k.1);
        match r {
            Ok(o) => {
                let verdict = if o.pass { "PASS" } else { "FAIL" };
                println!("criterion {id:>2}: {verdict}  {name}: {} [{secs:.2} s]", o.detail);
                if !o.pass {
                    any_fail = true;
                    match known {
                        Some(why) => println!("              known failure: {why}"),
                        None => unexpected.push(id),
                    }
                } else if known.is_some() {
                    println!("              listed as a known failure but passed");
                }
                if !o.reference_ok {
                    println!("              values differ from the independent reference");
                    unexpected.push(id);
                }
            }
            Err(err) => {
                any_fail = true;
                println!("criterion {id:>2}: FAIL  {name}: error: {err} [{secs:.2} s]");
                unexpected.push(id);
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        return ExitCode::FAILURE;
    }
    if strict && any_fail {
        println!("strict mode: failing on known failures");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
