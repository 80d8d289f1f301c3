//! C ABI for `hetsense`.
//!
//! Every function returns an [`HsStatus`]; results are written through out
//! pointers. Profiles and sensing systems are opaque handles created by
//! `hs_profile_from_*` / `hs_sensing_*` and released with the matching
//! `*_free`. On failure the
//! message of the last error on the calling thread is available through
//! [`hs_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use hetsense::harness::{load_config, run_to_files, trial_rng, Experiment};
use hetsense::occupancy::{
    block_averages, block_inversion_probability, measurement_count, occupancy_pmf, select_sparsity_level,
    tail_lower_bound, BlockPartition, OccupancyProfile,
};
use hetsense::recovery::{
    compute_weights, solve_cosamp, solve_l1, solve_omp, solve_weighted_l1, RecoveryResult, RecoveryStatus,
    SolverOptions, WeightVector,
};
use hetsense::sensing::{generate_sensing_matrix, SensingSystem};
use hetsense::{detection, CVector, Complex64, Error};
use nalgebra::DMatrix;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotFound = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

/// Recovery outcome, mirroring the library's solver status.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsRecoveryStatus {
    Converged = 0,
    MaxIterations = 1,
    Infeasible = 2,
}

/// Experiment selector for [`hs_run_experiment`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsExperiment {
    Weights = 0,
    Bound = 1,
    MseSweep = 2,
    Roc = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsSolverOptions {
    pub max_iterations: usize,
    pub primal_tolerance: f64,
    pub dual_tolerance: f64,
    pub penalty: f64,
    pub feasibility_slack: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsRecoveryInfo {
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: HsRecoveryStatus,
}

/// Opaque occupancy profile.
pub struct HsProfile {
    inner: OccupancyProfile,
}

/// Opaque sensing system.
pub struct HsSensingSystem {
    inner: SensingSystem,
}

struct FfiError {
    status: HsStatus,
    message: String,
}

impl FfiError {
    fn new(status: HsStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for FfiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Partition(_) | Error::Profile(_) | Error::Domain(_) => HsStatus::InvalidArgument,
            Error::Dimension(_) => HsStatus::DimensionMismatch,
            Error::SparsityLevelNotFound { .. } => HsStatus::NotFound,
            Error::ConfigParse { .. } | Error::ConfigInvalid(_) => HsStatus::Config,
            Error::Io { .. } | Error::Csv { .. } => HsStatus::Io,
        };
        Self::new(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, FfiError>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.message);
            e.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            HsStatus::Panic
        }
    }
}

fn null(name: &str) -> FfiError {
    FfiError::new(HsStatus::NullPointer, format!("{name} is null"))
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, name: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn out<'a, T>(ptr: *mut T, name: &str) -> FfiResult<&'a mut T> {
    ptr.as_mut().ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> FfiResult<&'a T> {
    ptr.as_ref().ok_or_else(|| null(name))
}

unsafe fn path(ptr: *const c_char, name: &str) -> FfiResult<PathBuf> {
    if ptr.is_null() {
        return Err(null(name));
    }
    let s = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| FfiError::new(HsStatus::InvalidArgument, format!("{name} is not valid UTF-8")))?;
    Ok(PathBuf::from(s))
}

fn check_len(name: &str, got: usize, expected: usize) -> FfiResult<()> {
    if got != expected {
        return Err(FfiError::new(
            HsStatus::DimensionMismatch,
            format!("{name} has length {got}, expected {expected}"),
        ));
    }
    Ok(())
}

fn to_vector(values: &[HsComplex]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|c| Complex64::new(c.re, c.im)))
}

fn write_vector(v: &CVector, dst: &mut [HsComplex]) {
    for (d, c) in dst.iter_mut().zip(v.iter()) {
        *d = HsComplex { re: c.re, im: c.im };
    }
}

impl From<SolverOptions> for HsSolverOptions {
    fn from(o: SolverOptions) -> Self {
        Self {
            max_iterations: o.max_iterations,
            primal_tolerance: o.primal_tolerance,
            dual_tolerance: o.dual_tolerance,
            penalty: o.penalty,
            feasibility_slack: o.feasibility_slack,
        }
    }
}

impl From<HsSolverOptions> for SolverOptions {
    fn from(o: HsSolverOptions) -> Self {
        Self {
            max_iterations: o.max_iterations,
            primal_tolerance: o.primal_tolerance,
            dual_tolerance: o.dual_tolerance,
            penalty: o.penalty,
            feasibility_slack: o.feasibility_slack,
        }
    }
}

/// Options pointer may be null, meaning defaults.
unsafe fn options(ptr: *const HsSolverOptions) -> SolverOptions {
    ptr.as_ref().map(|o| (*o).into()).unwrap_or_default()
}

fn finish(result: RecoveryResult, x_out: &mut [HsComplex], info: *mut HsRecoveryInfo) {
    write_vector(&result.x_hat, x_out);
    // SAFETY: `info` is either null or a valid pointer supplied by the caller.
    if let Some(info) = unsafe { info.as_mut() } {
        *info = HsRecoveryInfo {
            residual_norm: result.residual_norm,
            iterations: result.iterations,
            status: match result.status {
                RecoveryStatus::Converged => HsRecoveryStatus::Converged,
                RecoveryStatus::MaxIterations => HsRecoveryStatus::MaxIterations,
                RecoveryStatus::Infeasible => HsRecoveryStatus::Infeasible,
            },
        };
    }
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// excluding the terminator, or 0 if no error has occurred.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

#[no_mangle]
pub extern "C" fn hs_solver_options_default() -> HsSolverOptions {
    SolverOptions::default().into()
}

/// Profile from per-block probabilities.
///
/// # Safety
/// `block_sizes` and `block_prob` must point to `blocks` values; `out_profile` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_from_blocks(
    n: usize,
    block_sizes: *const usize,
    block_prob: *const f64,
    blocks: usize,
    out_profile: *mut *mut HsProfile,
) -> HsStatus {
    guard(|| {
        let out_profile = out(out_profile, "out_profile")?;
        let sizes = slice(block_sizes, blocks, "block_sizes")?;
        let probs = slice(block_prob, blocks, "block_prob")?;
        let partition = BlockPartition::new(n, sizes.to_vec())?;
        let inner = OccupancyProfile::from_block_probs(partition, probs)?;
        *out_profile = Box::into_raw(Box::new(HsProfile { inner }));
        Ok(())
    })
}

/// Profile from per-band probabilities.
///
/// # Safety
/// `block_sizes` must point to `blocks` values, `band_prob` to `n` values;
/// `out_profile` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_from_bands(
    n: usize,
    block_sizes: *const usize,
    blocks: usize,
    band_prob: *const f64,
    out_profile: *mut *mut HsProfile,
) -> HsStatus {
    guard(|| {
        let out_profile = out(out_profile, "out_profile")?;
        let sizes = slice(block_sizes, blocks, "block_sizes")?;
        let probs = slice(band_prob, n, "band_prob")?;
        let partition = BlockPartition::new(n, sizes.to_vec())?;
        let inner = OccupancyProfile::new(partition, probs.to_vec())?;
        *out_profile = Box::into_raw(Box::new(HsProfile { inner }));
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a handle from `hs_profile_from_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_free(profile: *mut HsProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// # Safety
/// `profile` must be a live handle; `out_mean` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_mean(profile: *const HsProfile, out_mean: *mut f64) -> HsStatus {
    guard(|| {
        *out(out_mean, "out_mean")? = handle(profile, "profile")?.inner.mean_occupied();
        Ok(())
    })
}

/// Writes the `blocks` block averages.
///
/// # Safety
/// `profile` must be a live handle; `out_averages` must hold `blocks` values.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_block_averages(
    profile: *const HsProfile,
    out_averages: *mut f64,
    blocks: usize,
) -> HsStatus {
    guard(|| {
        let p = &handle(profile, "profile")?.inner;
        check_len("out_averages", blocks, p.partition().num_blocks())?;
        slice_mut(out_averages, blocks, "out_averages")?.copy_from_slice(&block_averages(p));
        Ok(())
    })
}

/// Writes the `n + 1` entries of the occupied-band count PMF.
///
/// # Safety
/// `profile` must be a live handle; `out_pmf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_pmf(profile: *const HsProfile, out_pmf: *mut f64, len: usize) -> HsStatus {
    guard(|| {
        let p = &handle(profile, "profile")?.inner;
        check_len("out_pmf", len, p.partition().total_bands() + 1)?;
        slice_mut(out_pmf, len, "out_pmf")?.copy_from_slice(&occupancy_pmf(p));
        Ok(())
    })
}

/// # Safety
/// `profile` must be a live handle; `out_bound` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_tail_bound(profile: *const HsProfile, k0: usize, out_bound: *mut f64) -> HsStatus {
    guard(|| {
        let out_bound = out(out_bound, "out_bound")?;
        *out_bound = tail_lower_bound(&handle(profile, "profile")?.inner, k0)?;
        Ok(())
    })
}

/// # Safety
/// `profile` must be a live handle; `out_k0` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_select_sparsity(
    profile: *const HsProfile,
    alpha: f64,
    out_k0: *mut usize,
) -> HsStatus {
    guard(|| {
        let out_k0 = out(out_k0, "out_k0")?;
        *out_k0 = select_sparsity_level(&handle(profile, "profile")?.inner, alpha)?;
        Ok(())
    })
}

/// # Safety
/// `out_m` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_measurement_count(k0: usize, n: usize, c: f64, out_m: *mut usize) -> HsStatus {
    guard(|| {
        let out_m = out(out_m, "out_m")?;
        *out_m = measurement_count(k0, n, c)?;
        Ok(())
    })
}

/// # Safety
/// `out_prob` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_block_inversion_probability(
    n1: usize,
    q1: f64,
    n2: usize,
    q2: f64,
    out_prob: *mut f64,
) -> HsStatus {
    guard(|| {
        if n1 == 0 || n2 == 0 || !(0.0..=1.0).contains(&q1) || !(0.0..=1.0).contains(&q2) {
            return Err(FfiError::new(
                HsStatus::InvalidArgument,
                "block sizes must be positive and probabilities in [0, 1]",
            ));
        }
        *out(out_prob, "out_prob")? = block_inversion_probability(n1, q1, n2, q2);
        Ok(())
    })
}

/// Block weights from block averages.
///
/// # Safety
/// `averages` and `out_weights` must each hold `blocks` values.
#[no_mangle]
pub unsafe extern "C" fn hs_compute_weights(averages: *const f64, blocks: usize, out_weights: *mut f64) -> HsStatus {
    guard(|| {
        let w = compute_weights(slice(averages, blocks, "averages")?)?;
        slice_mut(out_weights, blocks, "out_weights")?.copy_from_slice(w.as_slice());
        Ok(())
    })
}

/// Random `m × n` Bernoulli sensing system drawn from `seed`.
///
/// # Safety
/// `out_system` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_sensing_generate(
    m: usize,
    n: usize,
    seed: u64,
    out_system: *mut *mut HsSensingSystem,
) -> HsStatus {
    guard(|| {
        let out_system = out(out_system, "out_system")?;
        let inner = generate_sensing_matrix(m, n, &mut trial_rng(seed, "ffi-sensing", 0))?;
        *out_system = Box::into_raw(Box::new(HsSensingSystem { inner }));
        Ok(())
    })
}

/// Sensing system from an explicit row-major `m × n` matrix `Ψ`.
///
/// # Safety
/// `psi` must hold `m * n` values; `out_system` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_sensing_from_psi(
    m: usize,
    n: usize,
    psi: *const f64,
    out_system: *mut *mut HsSensingSystem,
) -> HsStatus {
    guard(|| {
        let out_system = out(out_system, "out_system")?;
        let len = m.checked_mul(n).ok_or_else(|| FfiError::new(HsStatus::InvalidArgument, "m * n overflows"))?;
        if len == 0 {
            return Err(FfiError::new(HsStatus::InvalidArgument, "m and n must be positive"));
        }
        let values = slice(psi, len, "psi")?;
        let inner = SensingSystem::from_psi(DMatrix::from_row_slice(m, n, values))?;
        *out_system = Box::into_raw(Box::new(HsSensingSystem { inner }));
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_sensing_free(system: *mut HsSensingSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `system` must be a live handle; `out_m`, `out_n` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hs_sensing_dims(
    system: *const HsSensingSystem,
    out_m: *mut usize,
    out_n: *mut usize,
) -> HsStatus {
    guard(|| {
        let s = &handle(system, "system")?.inner;
        *out(out_m, "out_m")? = s.measurements();
        *out(out_n, "out_n")? = s.bands();
        Ok(())
    })
}

/// `y = A x`.
///
/// # Safety
/// `x` must hold `n` values and `out_y` `m` values.
#[no_mangle]
pub unsafe extern "C" fn hs_sensing_apply(
    system: *const HsSensingSystem,
    x: *const HsComplex,
    n: usize,
    out_y: *mut HsComplex,
    m: usize,
) -> HsStatus {
    guard(|| {
        let s = &handle(system, "system")?.inner;
        check_len("x", n, s.bands())?;
        check_len("out_y", m, s.measurements())?;
        let y = s.apply(&to_vector(slice(x, n, "x")?));
        write_vector(&y, slice_mut(out_y, m, "out_y")?);
        Ok(())
    })
}

struct SolveArgs<'a> {
    system: &'a SensingSystem,
    y: CVector,
    x_out: &'a mut [HsComplex],
}

unsafe fn solve_args<'a>(
    system: *const HsSensingSystem,
    y: *const HsComplex,
    m: usize,
    x_out: *mut HsComplex,
    n: usize,
) -> FfiResult<SolveArgs<'a>> {
    let system = &handle(system, "system")?.inner;
    check_len("y", m, system.measurements())?;
    check_len("out_x", n, system.bands())?;
    Ok(SolveArgs {
        system,
        y: to_vector(slice(y, m, "y")?),
        x_out: slice_mut(x_out, n, "out_x")?,
    })
}

/// Block-weighted ℓ1 recovery. `weights` and `block_sizes` hold one value
/// per block; `opts` may be null for defaults, `info` may be null.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn hs_solve_weighted_l1(
    system: *const HsSensingSystem,
    y: *const HsComplex,
    m: usize,
    block_sizes: *const usize,
    weights: *const f64,
    blocks: usize,
    epsilon: f64,
    opts: *const HsSolverOptions,
    out_x: *mut HsComplex,
    n: usize,
    info: *mut HsRecoveryInfo,
) -> HsStatus {
    guard(|| {
        let a = solve_args(system, y, m, out_x, n)?;
        let partition = BlockPartition::new(n, slice(block_sizes, blocks, "block_sizes")?.to_vec())?;
        let w = WeightVector::from_raw(slice(weights, blocks, "weights")?)?;
        let r = solve_weighted_l1(a.system, &a.y, &w, &partition, epsilon, &options(opts))?;
        finish(r, a.x_out, info);
        Ok(())
    })
}

/// Unweighted ℓ1 recovery.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn hs_solve_l1(
    system: *const HsSensingSystem,
    y: *const HsComplex,
    m: usize,
    epsilon: f64,
    opts: *const HsSolverOptions,
    out_x: *mut HsComplex,
    n: usize,
    info: *mut HsRecoveryInfo,
) -> HsStatus {
    guard(|| {
        let a = solve_args(system, y, m, out_x, n)?;
        let r = solve_l1(a.system, &a.y, epsilon, &options(opts))?;
        finish(r, a.x_out, info);
        Ok(())
    })
}

/// Orthogonal matching pursuit with at most `k_max` atoms.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn hs_solve_omp(
    system: *const HsSensingSystem,
    y: *const HsComplex,
    m: usize,
    k_max: usize,
    epsilon: f64,
    out_x: *mut HsComplex,
    n: usize,
    info: *mut HsRecoveryInfo,
) -> HsStatus {
    guard(|| {
        let a = solve_args(system, y, m, out_x, n)?;
        let r = solve_omp(a.system, &a.y, k_max, epsilon)?;
        finish(r, a.x_out, info);
        Ok(())
    })
}

/// CoSaMP with target sparsity `k`.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn hs_solve_cosamp(
    system: *const HsSensingSystem,
    y: *const HsComplex,
    m: usize,
    k: usize,
    epsilon: f64,
    opts: *const HsSolverOptions,
    out_x: *mut HsComplex,
    n: usize,
    info: *mut HsRecoveryInfo,
) -> HsStatus {
    guard(|| {
        let a = solve_args(system, y, m, out_x, n)?;
        let r = solve_cosamp(a.system, &a.y, k, epsilon, &options(opts))?;
        finish(r, a.x_out, info);
        Ok(())
    })
}

/// # Safety
/// `out_z` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_inverse_q(p: f64, out_z: *mut f64) -> HsStatus {
    guard(|| {
        let out_z = out(out_z, "out_z")?;
        *out_z = detection::inverse_q(p)?;
        Ok(())
    })
}

/// # Safety
/// `out_lambda` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_detection_threshold(
    noise_energy_mean: f64,
    m: usize,
    n: usize,
    pf_target: f64,
    out_lambda: *mut f64,
) -> HsStatus {
    guard(|| {
        let out_lambda = out(out_lambda, "out_lambda")?;
        *out_lambda = detection::detection_threshold(noise_energy_mean, m, n, pf_target)?;
        Ok(())
    })
}

/// Runs an experiment from a configuration file and writes its CSV to
/// `out_path` plus the resolved configuration next to it. `seed` may be
/// null to keep the configured seed; `trials` of 0 keeps the configured
/// trial count.
///
/// # Safety
/// `config_path` and `out_path` must be NUL-terminated strings; `seed`
/// must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn hs_run_experiment(
    experiment: HsExperiment,
    config_path: *const c_char,
    out_path: *const c_char,
    seed: *const u64,
    trials: usize,
) -> HsStatus {
    guard(|| {
        let mut config = load_config(path(config_path, "config_path")?)?;
        let out_path = path(out_path, "out_path")?;
        if let Some(&s) = seed.as_ref() {
            config.experiment.master_seed = s;
        }
        if trials > 0 {
            config.experiment.trials = Some(trials);
        }
        config.validate()?;
        let experiment = match experiment {
            HsExperiment::Weights => Experiment::Weights,
            HsExperiment::Bound => Experiment::Bound,
            HsExperiment::MseSweep => Experiment::MseSweep,
            HsExperiment::Roc => Experiment::Roc,
        };
        run_to_files(experiment, &config, &out_path)?;
        Ok(())
    })
}
