use std::ffi::CString;
use std::ptr;

use hetsense_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { hs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(511)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn paper_profile() -> *mut HsProfile {
    let sizes = [64usize; 4];
    let probs = [0.1, 0.01, 0.1, 0.01];
    let mut p = ptr::null_mut();
    let st = unsafe { hs_profile_from_blocks(256, sizes.as_ptr(), probs.as_ptr(), 4, &mut p) };
    assert_eq!(st, HsStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn profile_statistics() {
    let p = paper_profile();
    unsafe {
        let mut mean = 0.0;
        assert_eq!(hs_profile_mean(p, &mut mean), HsStatus::Ok);
        assert!((mean - 14.08).abs() < 1e-9);

        let mut avg = [0.0; 4];
        assert_eq!(hs_profile_block_averages(p, avg.as_mut_ptr(), 4), HsStatus::Ok);
        assert!((avg[1] - 0.64).abs() < 1e-9);
        assert_eq!(hs_profile_block_averages(p, avg.as_mut_ptr(), 3), HsStatus::DimensionMismatch);

        let mut pmf = vec![0.0; 257];
        assert_eq!(hs_profile_pmf(p, pmf.as_mut_ptr(), 257), HsStatus::Ok);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let mut bound = 0.0;
        assert_eq!(hs_profile_tail_bound(p, 25, &mut bound), HsStatus::Ok);
        assert!((bound - 0.967_710_457_2).abs() < 1e-9);

        let mut k0 = 0usize;
        assert_eq!(hs_profile_select_sparsity(p, 0.04, &mut k0), HsStatus::Ok);
        assert_eq!(k0, 25);

        let mut w = [0.0; 4];
        assert_eq!(hs_compute_weights(avg.as_ptr(), 4, w.as_mut_ptr()), HsStatus::Ok);
        assert!((w[1] - 10.0 / 22.0).abs() < 1e-12);

        let mut m = 0usize;
        assert_eq!(hs_measurement_count(25, 256, 1.0, &mut m), HsStatus::Ok);
        assert_eq!(m, 59);

        let mut q = 0.0;
        assert_eq!(hs_block_inversion_probability(64, 0.1, 64, 0.01, &mut q), HsStatus::Ok);
        assert!(q < 0.02 && q > 0.0);
        hs_profile_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let sizes = [4usize, 4];
        let probs = [0.5, 0.5];
        let mut p = ptr::null_mut();
        assert_eq!(hs_profile_from_blocks(9, sizes.as_ptr(), probs.as_ptr(), 2, &mut p), HsStatus::InvalidArgument);
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(hs_profile_mean(ptr::null(), &mut 0.0), HsStatus::NullPointer);
        assert!(last_error().contains("profile"), "{}", last_error());

        let mut z = 0.0;
        assert_eq!(hs_inverse_q(1.5, &mut z), HsStatus::InvalidArgument);
        assert_eq!(hs_inverse_q(0.5, &mut z), HsStatus::Ok);
        assert!(z.abs() < 1e-12);

        let mut lambda = 0.0;
        assert_eq!(hs_detection_threshold(256.0, 27, 256, 0.1, &mut lambda), HsStatus::Ok);
        assert!((lambda - 10.555_488_95).abs() < 1e-6);

        // freeing null is a no-op
        hs_profile_free(ptr::null_mut());
        hs_sensing_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_message() {
    unsafe {
        assert_eq!(hs_profile_mean(ptr::null(), &mut 0.0), HsStatus::NullPointer);
        let mut buf = [1 as std::ffi::c_char; 4];
        let full = hs_last_error_message(buf.as_mut_ptr(), buf.len());
        assert!(full > 3);
        assert_eq!(buf[3], 0);
    }
}

#[test]
fn recovery_through_the_abi() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(hs_sensing_generate(32, 64, 11, &mut sys), HsStatus::Ok);
        let (mut m, mut n) = (0usize, 0usize);
        assert_eq!(hs_sensing_dims(sys, &mut m, &mut n), HsStatus::Ok);
        assert_eq!((m, n), (32, 64));

        let mut x0 = vec![HsComplex { re: 0.0, im: 0.0 }; 64];
        for (i, &band) in [3usize, 17, 40].iter().enumerate() {
            x0[band] = HsComplex { re: 1.0 + i as f64, im: -0.5 };
        }
        let mut y = vec![HsComplex { re: 0.0, im: 0.0 }; 32];
        assert_eq!(hs_sensing_apply(sys, x0.as_ptr(), 64, y.as_mut_ptr(), 32), HsStatus::Ok);

        let err = |x: &[HsComplex]| {
            x.iter()
                .zip(&x0)
                .map(|(a, b)| (a.re - b.re).powi(2) + (a.im - b.im).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let opts = hs_solver_options_default();
        assert_eq!(opts.max_iterations, 2000);
        let mut x = vec![HsComplex { re: 0.0, im: 0.0 }; 64];
        let mut info = HsRecoveryInfo {
            residual_norm: -1.0,
            iterations: 0,
            status: HsRecoveryStatus::Infeasible,
        };

        assert_eq!(hs_solve_l1(sys, y.as_ptr(), 32, 0.0, &opts, x.as_mut_ptr(), 64, &mut info), HsStatus::Ok);
        assert!(err(&x) < 1e-4, "{}", err(&x));
        assert_eq!(info.status, HsRecoveryStatus::Converged);

        let sizes = [32usize, 32];
        let w = [0.5, 0.5];
        let st = hs_solve_weighted_l1(sys, y.as_ptr(), 32, sizes.as_ptr(), w.as_ptr(), 2, 0.0, ptr::null(), x.as_mut_ptr(), 64, ptr::null_mut());
        assert_eq!(st, HsStatus::Ok);
        assert!(err(&x) < 1e-4);

        assert_eq!(hs_solve_omp(sys, y.as_ptr(), 32, 3, 0.0, x.as_mut_ptr(), 64, &mut info), HsStatus::Ok);
        assert!(err(&x) < 1e-8);

        assert_eq!(hs_solve_cosamp(sys, y.as_ptr(), 32, 3, 0.0, &opts, x.as_mut_ptr(), 64, &mut info), HsStatus::Ok);
        assert!(err(&x) < 1e-8);

        assert_eq!(hs_solve_l1(sys, y.as_ptr(), 31, 0.0, &opts, x.as_mut_ptr(), 64, &mut info), HsStatus::DimensionMismatch);
        assert_eq!(hs_solve_omp(sys, y.as_ptr(), 32, 0, 0.0, x.as_mut_ptr(), 64, &mut info), HsStatus::InvalidArgument);
        hs_sensing_free(sys);
    }
}

#[test]
fn explicit_psi() {
    unsafe {
        let mut sys = ptr::null_mut();
        let psi = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(hs_sensing_from_psi(2, 2, psi.as_ptr(), &mut sys), HsStatus::InvalidArgument);
        assert!(sys.is_null());
        let psi = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(hs_sensing_from_psi(2, 2, psi.as_ptr(), &mut sys), HsStatus::Ok);
        hs_sensing_free(sys);
    }
}

#[test]
fn experiment_runner() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(
        &cfg,
        "[spectrum]\nn = 32\nblock_sizes = [16, 16]\nblock_prob = [0.2, 0.02]\n\
         [sensing]\nm = 16\n[signal]\nsnr_db = [15.0]\n[experiment]\ntrials = 2\n",
    )
    .unwrap();
    let out = dir.path().join("w.csv");
    let c_cfg = CString::new(cfg.to_str().unwrap()).unwrap();
    let c_out = CString::new(out.to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(hs_run_experiment(HsExperiment::Weights, c_cfg.as_ptr(), c_out.as_ptr(), ptr::null(), 0), HsStatus::Ok);
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("block,k_bar,omega\n"));
        assert!(dir.path().join("w.resolved.toml").exists());

        let seed = 5u64;
        assert_eq!(hs_run_experiment(HsExperiment::Roc, c_cfg.as_ptr(), c_out.as_ptr(), &seed, 3), HsStatus::Ok);
        let roc = std::fs::read_to_string(&out).unwrap();
        assert!(roc.starts_with("pf_target,method,trials,pd_mean,pf_empirical\n"));
        assert!(roc.lines().nth(1).unwrap().contains(",3,"));

        let missing = CString::new(dir.path().join("nope.cfg").to_str().unwrap()).unwrap();
        assert_eq!(hs_run_experiment(HsExperiment::Bound, missing.as_ptr(), c_out.as_ptr(), ptr::null(), 0), HsStatus::Io);
        assert_eq!(hs_run_experiment(HsExperiment::Bound, ptr::null(), c_out.as_ptr(), ptr::null(), 0), HsStatus::NullPointer);
    }
}
