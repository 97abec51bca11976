//! Acceptance checks for the complete pipeline, one test per criterion:
//! gradient correctness, real-composite oracle equivalence, metric
//! identities, complexity counts, desk-scale learning, model ordering,
//! angular-spread and frequency trends, deployment robustness, and artifact
//! determinism. Each test prints one `criterion N: PASS/FAIL — detail` line.
//!
//! Criteria 5–8 share a fixture of desk-scale trained models (complex nets
//! for six seeds, baselines for three, ~200 epochs each), built once on
//! first use; the trend checks add nine more trainings. Expect the suite to
//! run for roughly an hour on a single core.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use scnet_core::baseline::FnnModel;
use scnet_core::channel::{ArrayConfig, ScenarioParams};
use scnet_core::config::Preset;
use scnet_core::cvnn::{ComplexNetwork, GradientSet};
use scnet_core::dataset::{generate, GenParams};
use scnet_core::error::Error;
use scnet_core::eval::{
    complex_flops, deployment_nmse, nmse_report, real_flops, run_model, run_sweep, ModelKind,
    RunOutcome, RunSettings, SweepControl, SweepResult, SweepSpec,
};
use scnet_core::optim::{make_pool, mse, resolve_workers, AdamConfig, AdamState};
use scnet_core::rng::{derive_seed, stream};

fn report(n: usize, ok: bool, detail: &str) {
    println!("criterion {n}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
}

fn sample_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        })
        .collect()
}

/// Random layer widths in 4..=16, two or three layers deep.
fn small_sizes(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let depth = rng.random_range(2..=3);
    (0..=depth).map(|_| rng.random_range(4..=16)).collect()
}

fn mean(vals: &[f64]) -> f64 {
    vals.iter().sum::<f64>() / vals.len() as f64
}

fn sample_std(vals: &[f64]) -> f64 {
    let m = mean(vals);
    (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
}

// ---- Desk-scale fixture (criteria 5–8) ----

const DESK_SEEDS: [u64; 3] = [1, 2, 3];
/// Seeds for the deployment-robustness check. The path-count contrasts it
/// measures are fractions of a percent, so it averages over more trained
/// models than the three-seed criteria.
const DEPLOY_SEEDS: [u64; 6] = [1, 2, 3, 4, 5, 6];

struct DeskFixture {
    settings: RunSettings,
    /// Complex-net runs for `DEPLOY_SEEDS`; the first three belong to
    /// `DESK_SEEDS` and serve criteria 5 and 6.
    scnet: Vec<RunOutcome>,
    fnn: Vec<RunOutcome>,
}

static FIXTURE: OnceLock<DeskFixture> = OnceLock::new();

fn desk_fixture() -> &'static DeskFixture {
    FIXTURE.get_or_init(|| {
        let settings = Preset::Desk.config().run_settings().unwrap();
        let pool = make_pool(resolve_workers(None).unwrap()).unwrap();
        let train_all = |kind: ModelKind, seeds: &[u64]| -> Vec<RunOutcome> {
            seeds
                .iter()
                .map(|&seed| {
                    let t = Instant::now();
                    let out = run_model(&settings, kind, seed, &pool).unwrap();
                    eprintln!(
                        "fixture: trained {kind:?} seed {seed} in {:.0?} (eval nmse {:.4})",
                        t.elapsed(),
                        out.report.final_eval_nmse
                    );
                    out
                })
                .collect()
        };
        let scnet = train_all(ModelKind::Scnet, &DEPLOY_SEEDS);
        let fnn = train_all(ModelKind::Fnn, &DESK_SEEDS);
        DeskFixture { settings, scnet, fnn }
    })
}

fn final_nmses(outs: &[RunOutcome]) -> Vec<f64> {
    outs.iter().map(|o| o.report.final_eval_nmse).collect()
}

// ---- Criterion 1: analytic gradients vs central finite differences ----

#[test]
fn test_criterion_1_gradients_match_finite_differences() {
    let mut shape_rng = stream(derive_seed(900, "shapes", 0));
    let mut worst_rel: f64 = 0.0;
    let mut checked = 0usize;
    const V: usize = 2;

    for net_i in 0..100u64 {
        let sizes = small_sizes(&mut shape_rng);
        let n_out = *sizes.last().unwrap();
        let mut net =
            ComplexNetwork::init(&sizes, &mut stream(derive_seed(901, "net", net_i))).unwrap();
        let mut data_rng = stream(derive_seed(902, "data", net_i));
        let xs: Vec<Vec<Complex64>> = (0..V).map(|_| sample_complex(&mut data_rng, sizes[0])).collect();
        let ys: Vec<Vec<Complex64>> = (0..V).map(|_| sample_complex(&mut data_rng, n_out)).collect();

        let loss_of = |net: &ComplexNetwork| -> f64 {
            let mut acc = 0.0;
            for v in 0..V {
                let (pred, _) = net.forward(&xs[v]).unwrap();
                acc += pred.iter().zip(&ys[v]).map(|(p, y)| (p - y).norm_sqr()).sum::<f64>();
            }
            acc / (V * n_out) as f64
        };

        // Analytic gradients through the packed backward pass.
        let err_scale = 2.0 / (V * n_out) as f64;
        let mut grads = GradientSet::zeros_like(&net);
        for v in 0..V {
            let (pred, tape) = net.forward(&xs[v]).unwrap();
            let err: Vec<Complex64> =
                pred.iter().zip(&ys[v]).map(|(p, y)| (p - y) * err_scale).collect();
            grads.add_assign(&net.backward(&tape, &err).unwrap());
        }
        let mut analytic = vec![0.0; net.param_count()];
        grads.flatten_into(&mut analytic);

        // Central differences on every real parameter component.
        let mut params = vec![0.0; net.param_count()];
        net.read_params(&mut params);
        let h = 1e-6;
        for j in 0..params.len() {
            let orig = params[j];
            params[j] = orig + h;
            net.write_params(&params);
            let up = loss_of(&net);
            params[j] = orig - h;
            net.write_params(&params);
            let down = loss_of(&net);
            params[j] = orig;
            let numeric = (up - down) / (2.0 * h);
            let rel =
                (analytic[j] - numeric).abs() / analytic[j].abs().max(numeric.abs()).max(1e-2);
            worst_rel = worst_rel.max(rel);
            checked += 1;
        }
        net.write_params(&params);
    }

    let ok = worst_rel < 1e-6;
    report(
        1,
        ok,
        &format!("{checked} parameters across 100 networks, worst relative error {worst_rel:.3e}"),
    );
    assert!(ok, "finite-difference check failed: worst relative error {worst_rel:.3e}");
}

// ---- Criterion 2: real-composite oracle equivalence ----

#[test]
fn test_criterion_2_oracle_forward_and_adam_step_equivalence() {
    let mut shape_rng = stream(derive_seed(910, "shapes", 0));
    let mut worst_fwd: f64 = 0.0;
    let mut worst_step: f64 = 0.0;

    for trial in 0..100u64 {
        let sizes = small_sizes(&mut shape_rng);
        let n_in = sizes[0];
        let n_out = *sizes.last().unwrap();
        let net =
            ComplexNetwork::init(&sizes, &mut stream(derive_seed(911, "net", trial))).unwrap();
        let oracle = net.real_composite_oracle();
        let mut data_rng = stream(derive_seed(912, "data", trial));
        let x = sample_complex(&mut data_rng, n_in);
        let y = sample_complex(&mut data_rng, n_out);

        // Forward: the doubled real network must agree plane by plane.
        let (pred, tape) = net.forward(&x).unwrap();
        let mut x_stacked = vec![0.0; 2 * n_in];
        for (k, c) in x.iter().enumerate() {
            x_stacked[k] = c.re;
            x_stacked[n_in + k] = c.im;
        }
        let (pred_r, tape_r) = oracle.forward(&x_stacked).unwrap();
        for (k, p) in pred.iter().enumerate() {
            worst_fwd = worst_fwd.max((p.re - pred_r[k]).abs()).max((p.im - pred_r[n_out + k]).abs());
        }

        // One optimizer step from the same loss, both gradient routes.
        let err_scale = 2.0 / n_out as f64;
        let err: Vec<Complex64> = pred.iter().zip(&y).map(|(p, yv)| (p - yv) * err_scale).collect();
        let mut packed_flat = vec![0.0; net.param_count()];
        net.backward(&tape, &err).unwrap().flatten_into(&mut packed_flat);

        let mut err_stacked = vec![0.0; 2 * n_out];
        for (k, e) in err.iter().enumerate() {
            err_stacked[k] = e.re;
            err_stacked[n_out + k] = e.im;
        }
        let real_grads = oracle.backward(&tape_r, &err_stacked).unwrap();
        let mut oracle_flat = vec![0.0; net.param_count()];
        net.project_composite_grads(&real_grads).flatten_into(&mut oracle_flat);

        let mut base = vec![0.0; net.param_count()];
        net.read_params(&mut base);
        let mut via_packed = base.clone();
        let mut via_oracle = base;
        AdamState::new(via_packed.len(), AdamConfig::default())
            .unwrap()
            .step(&mut via_packed, &packed_flat);
        AdamState::new(via_oracle.len(), AdamConfig::default())
            .unwrap()
            .step(&mut via_oracle, &oracle_flat);
        for (a, b) in via_packed.iter().zip(&via_oracle) {
            worst_step = worst_step.max((a - b).abs());
        }
    }

    let ok = worst_fwd < 1e-12 && worst_step < 1e-12;
    report(
        2,
        ok,
        &format!(
            "100 (net, input, step) triples; worst forward diff {worst_fwd:.3e}, \
             worst updated-parameter diff {worst_step:.3e}"
        ),
    );
    assert!(ok, "oracle equivalence failed: forward {worst_fwd:.3e}, step {worst_step:.3e}");
}

// ---- Criterion 3: metric identities ----

#[test]
fn test_criterion_3_metric_identities() {
    let mut rng = stream(derive_seed(920, "h", 0));
    let h = sample_complex(&mut rng, 32);
    let zeros = vec![Complex64::new(0.0, 0.0); 32];
    let doubled: Vec<Complex64> = h.iter().map(|c| 2.0 * c).collect();

    let nmse_of = |pred: &[Complex64]| nmse_report(pred, &h, 32).unwrap().nmse;
    let self_nmse = nmse_of(&h);
    let zero_nmse = nmse_of(&zeros);
    let double_nmse = nmse_of(&doubled);
    // Squared-error residual [1, j] against a zero label: (1 + 1) / 2.
    let residual_loss = mse(
        &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    );

    let diffs = [
        self_nmse.abs(),
        (zero_nmse - 1.0).abs(),
        (double_nmse - 1.0).abs(),
        (residual_loss - 1.0).abs(),
    ];
    let worst = diffs.iter().fold(0.0f64, |a, &d| a.max(d));
    let ok = worst < 1e-12;
    report(
        3,
        ok,
        &format!(
            "nmse(h,h)={self_nmse:.1e}, nmse(0,h)={zero_nmse}, nmse(2h,h)={double_nmse}, \
             loss([1,j],0)={residual_loss}"
        ),
    );
    assert!(ok, "metric identities drifted: worst deviation {worst:.3e}");
}

// ---- Criterion 4: complexity counts ----

#[test]
fn test_criterion_4_flops_counts() {
    let paper_sizes = [128usize, 128, 64, 128, 128];
    let paper_flops = complex_flops(&paper_sizes);

    let mut rng = stream(derive_seed(930, "sizes", 0));
    let ratio_exact = (0..20).all(|_| {
        let sizes = small_sizes(&mut rng);
        complex_flops(&sizes) == 4 * real_flops(&sizes)
    });

    let ok = paper_flops == 196_608 && ratio_exact;
    report(
        4,
        ok,
        &format!("complex flops at {paper_sizes:?} = {paper_flops}, complex/real ratio exactly 4"),
    );
    assert!(ok, "flops arithmetic off: got {paper_flops}, ratio_exact={ratio_exact}");
}

// ---- Criterion 5: desk-scale learning ----

#[test]
fn test_criterion_5_desk_scale_learning() {
    let fx = desk_fixture();
    let mut ok = true;
    let mut details = Vec::new();
    for (seed, out) in DESK_SEEDS.iter().zip(&fx.scnet) {
        let first_loss = out.report.epochs.first().unwrap().train_loss;
        let last_loss = out.report.epochs.last().unwrap().train_loss;
        let nmse = out.report.final_eval_nmse;
        let nmse_ok = nmse < 0.9 * out.untrained_nmse;
        let loss_ok = last_loss < 0.2 * first_loss;
        ok &= nmse_ok && loss_ok;
        details.push(format!(
            "seed {seed}: nmse {:.4}/{:.4} (ratio {:.3}), loss {:.4}->{:.4} (ratio {:.3})",
            nmse,
            out.untrained_nmse,
            nmse / out.untrained_nmse,
            first_loss,
            last_loss,
            last_loss / first_loss
        ));
    }
    report(5, ok, &details.join("; "));
    assert!(ok, "desk-scale training margins not met: {}", details.join("; "));
}

// ---- Criterion 6: model ordering ----

#[test]
fn test_criterion_6_scnet_vs_fnn_ordering() {
    let fx = desk_fixture();
    let s = final_nmses(&fx.scnet[..DESK_SEEDS.len()]);
    let f = final_nmses(&fx.fnn);
    let (s_mean, f_mean) = (mean(&s), mean(&f));
    let spread = sample_std(&s).max(sample_std(&f));

    let ordered = s_mean <= f_mean;
    // The ordering is a mean over three seeds; a tie within one standard
    // deviation is reported rather than failed.
    let within_spread = (s_mean - f_mean) <= spread;
    let ok = ordered || within_spread;
    let note = if ordered {
        "ordered".to_string()
    } else if within_spread {
        format!("reversed but within one std ({spread:.4}); reported, not failed")
    } else {
        format!("reversed by more than one std ({spread:.4})")
    };
    report(
        6,
        ok,
        &format!("scnet mean nmse {s_mean:.4} vs fnn {f_mean:.4} over 3 seeds — {note}"),
    );
    assert!(ok, "scnet mean {s_mean:.4} exceeds fnn mean {f_mean:.4} by more than one std {spread:.4}");
}

// ---- Criterion 7: angular-spread and frequency-difference trends ----

#[test]
fn test_criterion_7_degradation_trends() {
    let fx = desk_fixture();
    let pool = make_pool(resolve_workers(None).unwrap()).unwrap();
    let scnet_mean_at = |res: &SweepResult, value: f64| -> f64 {
        res.rows
            .iter()
            .find(|r| r.model == "scnet" && r.control_value == value)
            .expect("row missing")
            .mean_nmse
    };
    let sweep = |control: SweepControl| -> SweepResult {
        let t = Instant::now();
        let res = run_sweep(
            &SweepSpec {
                settings: fx.settings.clone(),
                control,
                seeds: DESK_SEEDS.to_vec(),
                include_baseline: false,
                deploy_eval_count: 4096,
            },
            &pool,
        )
        .unwrap();
        eprintln!("trend sweep finished in {:.0?}", t.elapsed());
        res
    };

    let as_res = sweep(SweepControl::AngularSpreadDeg(vec![5.0, 25.0]));
    let (as_lo, as_hi) = (scnet_mean_at(&as_res, 5.0), scnet_mean_at(&as_res, 25.0));

    // The 120 MHz point of the frequency sweep is the base desk setting
    // (2.5 GHz + 120 MHz = 2.62 GHz) at the same seeds, so the fixture runs
    // are that point; only the 10 MHz point trains here.
    let fd_res = sweep(SweepControl::FrequencyDiffHz(vec![10e6]));
    let fd_lo = scnet_mean_at(&fd_res, 10e6);
    let fd_hi = mean(&final_nmses(&fx.scnet));

    let as_ok = as_lo < as_hi;
    let fd_ok = fd_lo < fd_hi;
    let ok = as_ok && fd_ok;
    report(
        7,
        ok,
        &format!(
            "mean nmse AS 5°={as_lo:.4} < 25°={as_hi:.4}: {as_ok}; \
             Δf 10 MHz={fd_lo:.4} < 120 MHz={fd_hi:.4}: {fd_ok} (3 seeds each)"
        ),
    );
    assert!(ok, "degradation trend violated: AS {as_lo:.4} vs {as_hi:.4}, Δf {fd_lo:.4} vs {fd_hi:.4}");
}

// ---- Criterion 8: robustness to deployment path-count mismatch ----

#[test]
fn test_criterion_8_path_count_robustness() {
    let fx = desk_fixture();
    let deploy_counts = [25usize, 50, 100];
    // rows[s][k]: seed s's model deployed at deploy_counts[k]. Deployment
    // sets share one master per seed (coupled across counts) and hold
    // 16,384 samples each: the path-count contrasts are fractions of a
    // percent, far below what three seeds and small sets resolve.
    let rows: Vec<Vec<f64>> = DEPLOY_SEEDS
        .iter()
        .zip(&fx.scnet)
        .map(|(&seed, out)| {
            deploy_counts
                .iter()
                .map(|&p| {
                    deployment_nmse(
                        &out.model,
                        &fx.settings,
                        p,
                        derive_seed(seed, "deploy", 0),
                        16_384,
                        out.train_scale,
                        out.channel_power,
                    )
                    .unwrap()
                })
                .collect()
        })
        .collect();
    for (seed, row) in DEPLOY_SEEDS.iter().zip(&rows) {
        eprintln!(
            "deployment seed {seed}: P=25 {:.4e}, P=50 {:.4e}, P=100 {:.4e}, \
             diffs vs matched {:+.2e} / {:+.2e}",
            row[0],
            row[1],
            row[2],
            row[0] - row[1],
            row[2] - row[1]
        );
    }
    let means: Vec<f64> = (0..deploy_counts.len())
        .map(|k| mean(&rows.iter().map(|r| r[k]).collect::<Vec<f64>>()))
        .collect();

    let matched = means[1];
    let min_ok = means.iter().all(|&m| matched <= m);
    let bounded_ok = means.iter().all(|&m| m.is_finite() && m < 10.0 * matched);
    let ok = min_ok && bounded_ok;
    report(
        8,
        ok,
        &format!(
            "mean nmse over {} seeds at P=25: {:.6}, P=50 (matched): {:.6}, P=100: {:.6}; \
             matched is minimum: {min_ok}, all within 10x: {bounded_ok}",
            DEPLOY_SEEDS.len(),
            means[0],
            means[1],
            means[2]
        ),
    );
    assert!(
        ok,
        "robustness rows {means:?} violate the matched-minimum or 10x bound"
    );
}

// ---- Criterion 9: determinism and file formats ----

#[test]
fn test_criterion_9_determinism_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();

    // Small generation setup shared by the checks below.
    let params = GenParams {
        count: 48,
        array: ArrayConfig::half_wavelength(8, 2.5e9).unwrap(),
        scenario: ScenarioParams {
            path_count: 6,
            angular_spread: 10f64.to_radians(),
            mean_doa_range: (-1.0, 1.0),
            delay_max: 1e-10,
            distance_range: (10.0, 500.0),
            rayleigh_scale: None,
        },
        f_up: 2.5e9,
        f_down: 2.62e9,
        snr_db: 25.0,
        perfect_estimation: false,
        noisy_labels: false,
        master_seed: derive_seed(77, "dataset", 0),
    };
    let ds = generate(&params).unwrap().dataset;

    // Dataset files round-trip bit-identically.
    let d1 = dir.path().join("d1.bin");
    let d2 = dir.path().join("d2.bin");
    ds.save(&d1).unwrap();
    let reloaded = scnet_core::dataset::Dataset::load(&d1).unwrap();
    let ds_eq = reloaded == ds;
    reloaded.save(&d2).unwrap();
    let ds_bytes_eq = std::fs::read(&d1).unwrap() == std::fs::read(&d2).unwrap();
    notes.push(format!("dataset round-trip: {}", ds_eq && ds_bytes_eq));

    // Weight files for both architectures round-trip bit-identically.
    let net = ComplexNetwork::init(&[8, 12, 8], &mut stream(7)).unwrap();
    let w1 = dir.path().join("w1.bin");
    let w2 = dir.path().join("w2.bin");
    net.save(&w1).unwrap();
    ComplexNetwork::load(&w1).unwrap().save(&w2).unwrap();
    let complex_eq = std::fs::read(&w1).unwrap() == std::fs::read(&w2).unwrap();
    let fnn = FnnModel::init(&[16, 20, 16], 0, &mut stream(8)).unwrap();
    let r1 = dir.path().join("r1.bin");
    let r2 = dir.path().join("r2.bin");
    fnn.save(&r1).unwrap();
    FnnModel::load(&r1).unwrap().save(&r2).unwrap();
    let real_eq = std::fs::read(&r1).unwrap() == std::fs::read(&r2).unwrap();
    notes.push(format!("weight round-trips: {}", complex_eq && real_eq));

    // Identical seeds reproduce identical metric traces end to end.
    let settings = RunSettings {
        array: params.array,
        scenario: params.scenario.clone(),
        f_up: params.f_up,
        f_down: params.f_down,
        snr_db: params.snr_db,
        perfect_estimation: false,
        noisy_labels: false,
        count: 48,
        train_fraction: 0.75,
        scnet_sizes: vec![8, 12, 8],
        fnn_sizes: vec![16, 20, 16],
        epochs: 3,
        batch_size: 12,
        lr: 0.001,
        shuffle: true,
    };
    let pool = make_pool(1).unwrap();
    let run_a = run_model(&settings, ModelKind::Scnet, 5, &pool).unwrap();
    let run_b = run_model(&settings, ModelKind::Scnet, 5, &pool).unwrap();
    let trace_eq = run_a.report == run_b.report && run_a.model == run_b.model;
    notes.push(format!("repeated-seed trace equality: {trace_eq}"));

    // Corrupted files yield typed errors.
    let good = std::fs::read(&d1).unwrap();
    let check = |bytes: Vec<u8>, name: &str| -> (bool, &'static str) {
        let p = dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        match scnet_core::dataset::Dataset::load(&p) {
            Err(Error::BadMagic { .. }) => (true, "bad magic"),
            Err(Error::UnsupportedVersion { .. }) => (true, "unsupported version"),
            Err(Error::Truncated(_)) => (true, "truncated"),
            Err(Error::Corrupt(_)) => (true, "corrupt"),
            _ => (false, "wrong or missing error"),
        }
    };
    let mut magic_flip = good.clone();
    magic_flip[0] ^= 0xFF;
    let (magic_ok, magic_kind) = check(magic_flip, "magic.bin");
    let mut version_bump = good.clone();
    version_bump[8..12].copy_from_slice(&2u32.to_le_bytes());
    let (version_ok, version_kind) = check(version_bump, "version.bin");
    let truncated = good[..good.len() - 8].to_vec();
    let (trunc_ok, trunc_kind) = check(truncated, "trunc.bin");
    let mut poisoned = good.clone();
    poisoned[76..84].copy_from_slice(&f64::NAN.to_le_bytes());
    let (nan_ok, nan_kind) = check(poisoned, "nan.bin");
    let typed_ok = magic_ok
        && magic_kind == "bad magic"
        && version_ok
        && version_kind == "unsupported version"
        && trunc_ok
        && trunc_kind == "truncated"
        && nan_ok
        && nan_kind == "corrupt";
    notes.push(format!("typed corruption errors: {typed_ok}"));

    let ok = ds_eq && ds_bytes_eq && complex_eq && real_eq && trace_eq && typed_ok;
    report(9, ok, &notes.join("; "));
    assert!(ok, "determinism/format checks failed: {}", notes.join("; "));
}
