//! Command-line front end for the library.
//!
//! Subcommands: `analyze`, `canonicalize`, `apply-channel`, `improve`,
//! `bound`, `teleport`, `demo`. States travel as JSON files with `dims`,
//! `re` and `im` fields in row-major order; every command prints to stdout
//! in either plain text or JSON (`--format`), and commands that produce a
//! state write it to `--out`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid state, 3 mode misuse,
//! 4 non-convergence, 5 failed demonstration check.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use fefkit::channels::{amplitude_damping, amplitude_damping_toward_one, apply_one_sided};
use fefkit::criteria::reduction_check;
use fefkit::fef::{
    classical_fidelity, fef_bruteforce, fef_closed_form, n_value, teleport_fidelity_from_f,
    DEFAULT_GRID_STEPS, DEFAULT_REFINE_ITERS,
};
use fefkit::improve::{
    best_improvement, border_state, delta, family_state, random_family_params, variant_optimum,
    FamilyParams, Variant,
};
use fefkit::linalg::{ComplexMatrix, Subsystem};
use fefkit::optimize::{max_overlap_sdp, recover_channel, SdpConfig};
use fefkit::state::{singlet, TwoQubitState};
use fefkit::teleport::{average_fidelity_exact, average_fidelity_mc_with_workers, sts_channel};
use fefkit::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "fefkit",
    version,
    about = "Analyze, improve and certify two-qubit teleportation resources"
)]
struct Cli {
    /// Output format for reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a state file and report its entanglement figures
    Analyze {
        /// State file to read
        path: PathBuf,
    },
    /// Rotate a state into canonical form and print the local unitaries
    Canonicalize {
        /// State file to read
        path: PathBuf,
        /// Write the canonical state to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a one-sided qubit channel to a state
    ApplyChannel {
        /// State file to read
        path: PathBuf,
        /// Channel kind: `ad` damps toward |0⟩, `ad1` toward |1⟩
        #[arg(long, value_enum)]
        channel: ChannelKind,
        /// Damping angle θ in [0, π/2]
        #[arg(long)]
        theta: f64,
        /// Subsystem the channel acts on
        #[arg(long, value_enum, ignore_case = true)]
        side: SideArg,
        /// Write the transformed state to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Improve the fully entangled fraction with one-sided damping
    ///
    /// Without flags, reports the closed-form optimum of all four damping
    /// variants (family-form states only). With `--sweep` the angle grid is
    /// scanned instead. With `--channel`, `--theta` and `--side` one
    /// explicit channel is applied to an arbitrary state.
    Improve {
        /// State file to read
        path: PathBuf,
        /// Scan this many grid intervals over θ ∈ [0, π/2] per variant
        #[arg(long)]
        sweep: Option<usize>,
        /// Explicit channel kind for arbitrary states
        #[arg(long, value_enum)]
        channel: Option<ChannelKind>,
        /// Damping angle θ in [0, π/2] for the explicit channel
        #[arg(long)]
        theta: Option<f64>,
        /// Subsystem the explicit channel acts on
        #[arg(long, value_enum, ignore_case = true)]
        side: Option<SideArg>,
        /// Write the transformed state to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound the one-sided optimum of f by projected gradient ascent
    Bound {
        /// State file to read
        path: PathBuf,
        /// Subsystem the channel may act on
        #[arg(long, value_enum, ignore_case = true)]
        side: SideArg,
        /// Gradient step scale; the schedule is step-size/√k
        #[arg(long, default_value_t = 0.5)]
        step_size: f64,
        /// Maximum ascent iterations per start
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        /// Alternating-projection iterations per feasibility restoration
        #[arg(long, default_value_t = 200)]
        dykstra_iters: usize,
        /// Convergence tolerance on the feasibility gap
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Seed for the randomized start
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact and Monte Carlo teleportation fidelity through the state
    Teleport {
        /// State file to read
        path: PathBuf,
        /// Monte Carlo sample count
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Seed for the input-state stream
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads for the Monte Carlo run
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the deterministic end-to-end reproduction table
    Demo,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ChannelKind {
    /// Amplitude damping toward |0⟩
    Ad,
    /// Amplitude damping toward |1⟩
    Ad1,
}

impl ChannelKind {
    fn name(self) -> &'static str {
        match self {
            ChannelKind::Ad => "ad",
            ChannelKind::Ad1 => "ad1",
        }
    }

    fn build(self, theta: f64) -> fefkit::Result<fefkit::channels::KrausChannel> {
        match self {
            ChannelKind::Ad => amplitude_damping(theta),
            ChannelKind::Ad1 => amplitude_damping_toward_one(theta),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "UPPER")]
enum SideArg {
    A,
    B,
}

impl From<SideArg> for Subsystem {
    fn from(side: SideArg) -> Subsystem {
        match side {
            SideArg::A => Subsystem::A,
            SideArg::B => Subsystem::B,
        }
    }
}

/// On-disk state representation: row-major real and imaginary parts.
#[derive(Serialize, Deserialize)]
struct StateFile {
    dims: [usize; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

enum CliError {
    /// Unreadable or unwritable file, or a file that is not a state
    /// document at all.
    Io(String),
    /// The file parsed but its matrix fails state validation.
    State(Error),
    /// Flags that contradict each other or a mode used on the wrong state.
    Mode(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::State(_) => 2,
            CliError::Mode(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(detail) => detail.clone(),
            CliError::State(err) => err.to_string(),
            CliError::Mode(detail) => detail.clone(),
        }
    }
}

fn read_state(path: &Path) -> Result<TwoQubitState, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("{}: not a state file: {e}", path.display())))?;
    state_from_file(&file).map_err(CliError::State)
}

fn state_from_file(file: &StateFile) -> fefkit::Result<TwoQubitState> {
    if file.dims != [2, 2] {
        return Err(Error::DimensionMismatch {
            expected_rows: 2,
            expected_cols: 2,
            rows: file.dims[0],
            cols: file.dims[1],
        });
    }
    for part in [&file.re, &file.im] {
        if part.len() != 4 || part.iter().any(|row| row.len() != 4) {
            return Err(Error::DimensionMismatch {
                expected_rows: 4,
                expected_cols: 4,
                rows: part.len(),
                cols: part.first().map_or(0, Vec::len),
            });
        }
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, Complex64::new(file.re[i][j], file.im[i][j]));
        }
    }
    TwoQubitState::new(m)
}

fn write_state(path: &Path, state: &TwoQubitState) -> Result<(), CliError> {
    let mut re = vec![vec![0.0; 4]; 4];
    let mut im = vec![vec![0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let z = state.entry(i, j);
            re[i][j] = z.re;
            im[i][j] = z.im;
        }
    }
    let file = StateFile { dims: [2, 2], re, im };
    let text = serde_json::to_string_pretty(&file).expect("state file serializes");
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.9}{:+.9}i", z.re, z.im)
}

fn matrix_text(m: &ComplexMatrix, indent: &str) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt_c(m.get(i, j))).collect();
        out.push_str(indent);
        out.push('[');
        out.push_str(&row.join(", "));
        out.push_str("]\n");
    }
    out
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let mut re = Vec::with_capacity(m.rows());
    let mut im = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut re_row = Vec::with_capacity(m.cols());
        let mut im_row = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            re_row.push(m.get(i, j).re);
            im_row.push(m.get(i, j).im);
        }
        re.push(re_row);
        im.push(im_row);
    }
    json!({ "re": re, "im": im })
}

fn fmt3(v: [f64; 3]) -> String {
    format!("[{:+.9}, {:+.9}, {:+.9}]", v[0], v[1], v[2])
}

struct Report {
    text: String,
    json: Value,
    exit: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, exit: 0 }
    }
}

fn cmd_analyze(path: &Path) -> Result<Report, CliError> {
    let state = read_state(path)?;
    let hs = state.hilbert_schmidt();
    let canonical = state.canonicalize().canonical;
    let canon_t = canonical.hilbert_schmidt().t;
    let canon_diag = [canon_t[0][0], canon_t[1][1], canon_t[2][2]];
    let fef = fef_closed_form(&state);
    let n = n_value(&state);
    let fidelity = teleport_fidelity_from_f(fef.value, 2).expect("f from closed form is in range");
    let f_cl = classical_fidelity(2);
    let reduction = reduction_check(&state);

    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str(&format!("r = {}\n", fmt3(hs.r)));
    text.push_str(&format!("s = {}\n", fmt3(hs.s)));
    text.push_str("T =\n");
    for row in hs.t {
        text.push_str(&format!("  {}\n", fmt3(row)));
    }
    text.push_str(&format!("canonical T diagonal = {}\n", fmt3(canon_diag)));
    text.push_str(&format!(
        "f = {:.12}  (attained on singlet: {})\n",
        fef.value,
        if fef.attained_on_singlet { "yes" } else { "no" }
    ));
    text.push_str(&format!("N = {:.12}\n", n));
    text.push_str(&format!("F = {:.12}\n", fidelity));
    text.push_str(&format!("F_cl = {:.12}\n", f_cl));
    text.push_str(&format!(
        "reduction A: min eigenvalue {:+.12} ({})\n",
        reduction.min_eig_a,
        if reduction.violated_a { "violated" } else { "satisfied" }
    ));
    text.push_str(&format!(
        "reduction B: min eigenvalue {:+.12} ({})\n",
        reduction.min_eig_b,
        if reduction.violated_b { "violated" } else { "satisfied" }
    ));

    let json = json!({
        "command": "analyze",
        "path": path.display().to_string(),
        "r": hs.r,
        "s": hs.s,
        "t": hs.t,
        "canonical_t_diagonal": canon_diag,
        "f": fef.value,
        "attained_on_singlet": fef.attained_on_singlet,
        "n": n,
        "fidelity": fidelity,
        "classical_fidelity": f_cl,
        "reduction": {
            "min_eig_a": reduction.min_eig_a,
            "min_eig_b": reduction.min_eig_b,
            "violated_a": reduction.violated_a,
            "violated_b": reduction.violated_b,
        },
    });
    Ok(Report::ok(text, json))
}

fn cmd_canonicalize(path: &Path, out: Option<&Path>) -> Result<Report, CliError> {
    let state = read_state(path)?;
    let decomposition = state.canonicalize();
    let canon_t = decomposition.canonical.hilbert_schmidt().t;
    let canon_diag = [canon_t[0][0], canon_t[1][1], canon_t[2][2]];
    if let Some(out_path) = out {
        write_state(out_path, &decomposition.canonical)?;
    }

    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str(&format!("canonical T diagonal = {}\n", fmt3(canon_diag)));
    text.push_str("U1 (apply as (U1⊗U2) ρ (U1⊗U2)†) =\n");
    text.push_str(&matrix_text(decomposition.pair.u1(), "  "));
    text.push_str("U2 =\n");
    text.push_str(&matrix_text(decomposition.pair.u2(), "  "));
    if let Some(out_path) = out {
        text.push_str(&format!("canonical state written to {}\n", out_path.display()));
    }

    let json = json!({
        "command": "canonicalize",
        "path": path.display().to_string(),
        "canonical_t_diagonal": canon_diag,
        "u1": matrix_json(decomposition.pair.u1()),
        "u2": matrix_json(decomposition.pair.u2()),
        "out": out.map(|p| p.display().to_string()),
    });
    Ok(Report::ok(text, json))
}

fn cmd_apply_channel(
    path: &Path,
    kind: ChannelKind,
    theta: f64,
    side: SideArg,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let state = read_state(path)?;
    let channel = kind.build(theta).map_err(CliError::State)?;
    let transformed = apply_one_sided(&state, &channel, side.into());
    let f_before = fef_closed_form(&state).value;
    let f_after = fef_closed_form(&transformed).value;
    if let Some(out_path) = out {
        write_state(out_path, &transformed)?;
    }

    let mut text = String::new();
    text.push_str(&format!(
        "channel = {} (θ = {:.9}), side = {}\n",
        kind.name(),
        theta,
        Subsystem::from(side)
    ));
    text.push_str(&format!("f before = {:.12}\n", f_before));
    text.push_str(&format!("f after  = {:.12}\n", f_after));
    if let Some(out_path) = out {
        text.push_str(&format!("transformed state written to {}\n", out_path.display()));
    }

    let json = json!({
        "command": "apply-channel",
        "path": path.display().to_string(),
        "channel": kind.name(),
        "theta": theta,
        "side": Subsystem::from(side).to_string(),
        "f_before": f_before,
        "f_after": f_after,
        "out": out.map(|p| p.display().to_string()),
    });
    Ok(Report::ok(text, json))
}

/// Convert the family-form errors of closed-form and sweep modes into a
/// mode-misuse failure that points at the explicit-channel escape hatch.
fn family_mode_error(err: Error) -> CliError {
    match err {
        Error::NotFamilyForm { detail } => CliError::Mode(format!(
            "closed-form improvement needs the family zero pattern ({detail}); \
             use `improve <path> --channel ad --theta <x> --side A|B` for arbitrary states"
        )),
        other => CliError::State(other),
    }
}

fn improvement_lines(f_before: f64, f_after: f64, text: &mut String) {
    let fidelity_after =
        teleport_fidelity_from_f(f_after, 2).expect("f from closed form is in range");
    text.push_str(&format!("f  = {:.12}\n", f_before));
    text.push_str(&format!("f̃  = {:.12}  (closed form after channel)\n", f_after));
    text.push_str(&format!(
        "F̃  = {:.12}  (classical threshold {:.12})\n",
        fidelity_after,
        classical_fidelity(2)
    ));
}

fn cmd_improve_closed_form(
    path: &Path,
    state: &TwoQubitState,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let report = best_improvement(state).map_err(family_mode_error)?;
    let mut variants = Vec::new();
    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str("variant   θ*          cos θ*      Δ(θ*)\n");
    for variant in Variant::ALL {
        let (theta, gain) = variant_optimum(state, variant).map_err(family_mode_error)?;
        text.push_str(&format!(
            "{:<8}  {:.9}  {:.9}  {:.9}\n",
            variant.label(),
            theta,
            theta.cos(),
            gain
        ));
        variants.push(json!({
            "variant": variant.label(),
            "theta_star": theta,
            "cos_theta_star": theta.cos(),
            "delta": gain,
        }));
    }
    let improvable = report.predicted_delta > 0.0;
    if improvable {
        text.push_str(&format!(
            "best: {} at θ* = {:.9} (cos θ* = {:.9}), Δ = {:.9}\n",
            report.variant.label(),
            report.theta_star,
            report.theta_star.cos(),
            report.predicted_delta
        ));
    } else {
        text.push_str("no improving variant (Δ ≤ 0)\n");
    }
    improvement_lines(report.f_before, report.f_after_recomputed, &mut text);
    if let Some(out_path) = out {
        write_state(out_path, &report.transformed)?;
        text.push_str(&format!("transformed state written to {}\n", out_path.display()));
    }

    let json = json!({
        "command": "improve",
        "mode": "closed-form",
        "path": path.display().to_string(),
        "variants": variants,
        "improvable": improvable,
        "best": {
            "variant": report.variant.label(),
            "theta_star": report.theta_star,
            "cos_theta_star": report.theta_star.cos(),
            "delta": report.predicted_delta,
        },
        "f_before": report.f_before,
        "f_after": report.f_after_recomputed,
        "fidelity_after": teleport_fidelity_from_f(report.f_after_recomputed, 2)
            .expect("f from closed form is in range"),
        "classical_fidelity": classical_fidelity(2),
        "out": out.map(|p| p.display().to_string()),
    });
    Ok(Report::ok(text, json))
}

fn cmd_improve_sweep(
    path: &Path,
    state: &TwoQubitState,
    steps: usize,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    if steps < 2 {
        return Err(CliError::Mode(format!(
            "--sweep needs at least 2 grid intervals, got {steps}"
        )));
    }
    let mut variants = Vec::new();
    let mut best: Option<(Variant, f64, f64)> = None;
    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str(&format!("sweep over {steps} intervals of θ ∈ [0, π/2]\n"));
    text.push_str("variant   grid θ       grid Δ        closed-form Δ*\n");
    for variant in Variant::ALL {
        let mut grid_best = (0.0, f64::NEG_INFINITY);
        for k in 0..=steps {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64;
            let gain = delta(state, variant, theta).map_err(family_mode_error)?;
            if gain > grid_best.1 {
                grid_best = (theta, gain);
            }
        }
        let (_, closed_gain) = variant_optimum(state, variant).map_err(family_mode_error)?;
        text.push_str(&format!(
            "{:<8}  {:.9}  {:+.9}  {:+.9}\n",
            variant.label(),
            grid_best.0,
            grid_best.1,
            closed_gain
        ));
        variants.push(json!({
            "variant": variant.label(),
            "grid_theta": grid_best.0,
            "grid_delta": grid_best.1,
            "closed_form_delta": closed_gain,
        }));
        if best.map_or(true, |(_, _, d)| grid_best.1 > d) {
            best = Some((variant, grid_best.0, grid_best.1));
        }
    }
    let (variant, theta, gain) = best.expect("four variants scanned");
    let f_before = fef_closed_form(state).value;
    let (transformed, f_after) = if gain > 0.0 {
        let channel = variant.channel(theta).map_err(CliError::State)?;
        let transformed = apply_one_sided(state, &channel, variant.side());
        let f_after = fef_closed_form(&transformed).value;
        (transformed, f_after)
    } else {
        (state.clone(), f_before)
    };
    if gain > 0.0 {
        text.push_str(&format!(
            "best: {} at θ = {:.9}, Δ = {:.9}\n",
            variant.label(),
            theta,
            gain
        ));
    } else {
        text.push_str("no improving variant (Δ ≤ 0)\n");
    }
    improvement_lines(f_before, f_after, &mut text);
    if let Some(out_path) = out {
        write_state(out_path, &transformed)?;
        text.push_str(&format!("transformed state written to {}\n", out_path.display()));
    }

    let json = json!({
        "command": "improve",
        "mode": "sweep",
        "path": path.display().to_string(),
        "steps": steps,
        "variants": variants,
        "improvable": gain > 0.0,
        "best": {
            "variant": variant.label(),
            "theta": theta,
            "delta": gain,
        },
        "f_before": f_before,
        "f_after": f_after,
        "fidelity_after": teleport_fidelity_from_f(f_after, 2)
            .expect("f from closed form is in range"),
        "classical_fidelity": classical_fidelity(2),
        "out": out.map(|p| p.display().to_string()),
    });
    Ok(Report::ok(text, json))
}

fn cmd_improve_explicit(
    path: &Path,
    state: &TwoQubitState,
    kind: ChannelKind,
    theta: f64,
    side: SideArg,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let channel = kind.build(theta).map_err(CliError::State)?;
    let transformed = apply_one_sided(state, &channel, side.into());
    let f_before = fef_closed_form(state).value;
    let f_after = fef_closed_form(&transformed).value;
    let f_after_brute = fef_bruteforce(&transformed, DEFAULT_GRID_STEPS, DEFAULT_REFINE_ITERS);
    if let Some(out_path) = out {
        write_state(out_path, &transformed)?;
    }

    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str(&format!(
        "channel = {} (θ = {:.9}), side = {}\n",
        kind.name(),
        theta,
        Subsystem::from(side)
    ));
    text.push_str(&format!("f before = {:.12}\n", f_before));
    text.push_str(&format!("f after  = {:.12}  (closed form)\n", f_after));
    text.push_str(&format!("f after  = {:.12}  (brute force)\n", f_after_brute));
    text.push_str(&format!("Δf = {:+.12}\n", f_after - f_before));
    if let Some(out_path) = out {
        text.push_str(&format!("transformed state written to {}\n", out_path.display()));
    }

    let json = json!({
        "command": "improve",
        "mode": "explicit",
        "path": path.display().to_string(),
        "channel": kind.name(),
        "theta": theta,
        "side": Subsystem::from(side).to_string(),
        "f_before": f_before,
        "f_after": f_after,
        "f_after_bruteforce": f_after_brute,
        "delta_f": f_after - f_before,
        "out": out.map(|p| p.display().to_string()),
    });
    Ok(Report::ok(text, json))
}

#[allow(clippy::too_many_arguments)]
fn cmd_improve(
    path: &Path,
    sweep: Option<usize>,
    channel: Option<ChannelKind>,
    theta: Option<f64>,
    side: Option<SideArg>,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let explicit = channel.is_some() || theta.is_some() || side.is_some();
    if explicit && sweep.is_some() {
        return Err(CliError::Mode(
            "pick one of --sweep or --channel/--theta/--side".into(),
        ));
    }
    let state = read_state(path)?;
    if explicit {
        match (channel, theta, side) {
            (Some(kind), Some(theta), Some(side)) => {
                cmd_improve_explicit(path, &state, kind, theta, side, out)
            }
            _ => Err(CliError::Mode(
                "explicit mode needs all of --channel, --theta and --side".into(),
            )),
        }
    } else if let Some(steps) = sweep {
        cmd_improve_sweep(path, &state, steps, out)
    } else {
        cmd_improve_closed_form(path, &state, out)
    }
}

fn cmd_bound(path: &Path, side: SideArg, config: &SdpConfig) -> Result<Report, CliError> {
    let state = read_state(path)?;
    let f_input = fef_closed_form(&state).value;
    let side_label = Subsystem::from(side).to_string();
    match max_overlap_sdp(&state, side.into(), config) {
        Ok(result) => {
            let fidelity = teleport_fidelity_from_f(result.value, 2)
                .expect("certified overlap is in range");
            let mut text = String::new();
            text.push_str(&format!("state: {}\n", path.display()));
            text.push_str(&format!("side = {side_label}\n"));
            text.push_str(&format!(
                "value = {:.12}  (certified lower bound on the side-{side_label} optimum of f)\n",
                result.value
            ));
            text.push_str(&format!("feasibility gap = {:.3e}\n", result.feasibility_gap));
            text.push_str(&format!(
                "iterations = {}  ({})\n",
                result.iterations,
                if result.converged { "converged" } else { "iteration limit" }
            ));
            text.push_str(&format!("f of input = {:.12}\n", f_input));
            text.push_str(&format!("F from bound = {:.12}\n", fidelity));

            let mut json = json!({
                "command": "bound",
                "path": path.display().to_string(),
                "side": side_label,
                "value": result.value,
                "feasibility_gap": result.feasibility_gap,
                "iterations": result.iterations,
                "converged": result.converged,
                "f_input": f_input,
                "fidelity_from_bound": fidelity,
            });
            match recover_channel(&result, side.into()) {
                Ok(channel) => {
                    let achieved = fef_closed_form(&apply_one_sided(
                        &state,
                        &channel,
                        side.into(),
                    ))
                    .value;
                    text.push_str("recovered channel Kraus operators:\n");
                    let mut kraus_json = Vec::new();
                    for (k, op) in channel.operators().iter().enumerate() {
                        text.push_str(&format!("K{} =\n", k + 1));
                        text.push_str(&matrix_text(op, "  "));
                        kraus_json.push(matrix_json(op));
                    }
                    text.push_str(&format!(
                        "f after recovered channel = {:.12}\n",
                        achieved
                    ));
                    json["kraus_operators"] = Value::Array(kraus_json);
                    json["f_after_recovered_channel"] = json!(achieved);
                }
                Err(err) => {
                    // The bound itself still stands; only the certificate
                    // extraction failed.
                    text.push_str(&format!("channel recovery failed: {err}\n"));
                    json["channel_recovery_error"] = json!(err.to_string());
                    return Ok(Report { text, json, exit: 4 });
                }
            }
            Ok(Report::ok(text, json))
        }
        Err(Error::NonConvergence { gap, iterations, best_value }) => {
            let mut text = String::new();
            text.push_str(&format!("state: {}\n", path.display()));
            text.push_str(&format!("side = {side_label}\n"));
            text.push_str(&format!(
                "did not converge: feasibility gap {:.3e} after {} iterations (tolerance {:.1e})\n",
                gap, iterations, config.tol
            ));
            if let Some(value) = best_value {
                text.push_str(&format!(
                    "best value found = {:.12}  (uncertified; raise --max-iters or --dykstra-iters)\n",
                    value
                ));
            }
            let json = json!({
                "command": "bound",
                "path": path.display().to_string(),
                "side": side_label,
                "converged": false,
                "feasibility_gap": gap,
                "iterations": iterations,
                "best_value": best_value,
            });
            Ok(Report { text, json, exit: 4 })
        }
        Err(other) => Err(CliError::State(other)),
    }
}

fn cmd_teleport(
    path: &Path,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Report, CliError> {
    let state = read_state(path)?;
    let channel = sts_channel(&state);
    let exact = average_fidelity_exact(&channel);
    let mc = average_fidelity_mc_with_workers(&channel, samples, seed, workers);
    let f = fef_closed_form(&state).value;
    let formula = teleport_fidelity_from_f(f, 2).expect("f from closed form is in range");

    let mut text = String::new();
    text.push_str(&format!("state: {}\n", path.display()));
    text.push_str(&format!("exact average fidelity = {:.12}\n", exact));
    text.push_str(&format!(
        "MC estimate = {:.9} ± {:.9}  (samples = {}, seed = {}, workers = {})\n",
        mc.mean, mc.stderr, samples, seed, workers
    ));
    text.push_str(&format!("(2f+1)/3 = {:.12}  (f = {:.12})\n", formula, f));
    text.push_str(&format!("|exact − (2f+1)/3| = {:.3e}\n", (exact - formula).abs()));

    let json = json!({
        "command": "teleport",
        "path": path.display().to_string(),
        "exact": exact,
        "mc_mean": mc.mean,
        "mc_stderr": mc.stderr,
        "samples": samples,
        "seed": seed,
        "workers": workers,
        "f": f,
        "fidelity_from_f": formula,
        "exact_vs_formula": (exact - formula).abs(),
    });
    Ok(Report::ok(text, json))
}

struct DemoCheck {
    name: &'static str,
    pass: bool,
    line: String,
    data: Value,
}

fn counterexample_state() -> TwoQubitState {
    family_state(&FamilyParams::new(0.0, -1.0, 0.0, 0.25))
        .expect("counterexample parameters are valid")
}

fn cmd_demo() -> Report {
    let mut checks = Vec::new();

    let border = border_state();
    let f_border = fef_closed_form(&border).value;
    checks.push(DemoCheck {
        name: "border-f",
        pass: (f_border - 0.5).abs() <= 1e-12,
        line: format!("f = {:.15}  (target 0.5 ± 1e-12)", f_border),
        data: json!({ "f": f_border, "target": 0.5, "tolerance": 1e-12 }),
    });

    let reduction = reduction_check(&border);
    let reduction_target = -0.0857864;
    checks.push(DemoCheck {
        name: "border-reduction",
        pass: (reduction.min_eig_a - reduction_target).abs() <= 1e-6
            && (reduction.min_eig_b - reduction_target).abs() <= 1e-6
            && reduction.violated_a
            && reduction.violated_b,
        line: format!(
            "min eigenvalues A = {:.9}, B = {:.9}  (target {} ± 1e-6, both violated)",
            reduction.min_eig_a, reduction.min_eig_b, reduction_target
        ),
        data: json!({
            "min_eig_a": reduction.min_eig_a,
            "min_eig_b": reduction.min_eig_b,
            "target": reduction_target,
            "tolerance": 1e-6,
        }),
    });

    let improvement = best_improvement(&border).expect("border state is family form");
    let cos_star = improvement.theta_star.cos();
    checks.push(DemoCheck {
        name: "border-angle",
        pass: (cos_star - 0.630602).abs() <= 1e-4,
        line: format!(
            "{} with cos θ* = {:.9}  (target 0.630602 ± 1e-4)",
            improvement.variant.label(),
            cos_star
        ),
        data: json!({
            "variant": improvement.variant.label(),
            "cos_theta_star": cos_star,
            "target": 0.630602,
            "tolerance": 1e-4,
        }),
    });

    checks.push(DemoCheck {
        name: "border-delta",
        pass: (improvement.predicted_delta - 0.0224077).abs() <= 1e-6,
        line: format!(
            "Δ = {:.9}  (target 0.0224077 ± 1e-6)",
            improvement.predicted_delta
        ),
        data: json!({
            "delta": improvement.predicted_delta,
            "target": 0.0224077,
            "tolerance": 1e-6,
        }),
    });

    let f_improved = improvement.f_after_recomputed;
    checks.push(DemoCheck {
        name: "border-f-improved",
        pass: (f_improved - 0.5224077).abs() <= 1e-6,
        line: format!("f̃ = {:.9}  (target 0.5224077 ± 1e-6)", f_improved),
        data: json!({ "f_improved": f_improved, "target": 0.5224077, "tolerance": 1e-6 }),
    });

    let brute = fef_bruteforce(
        &improvement.transformed,
        DEFAULT_GRID_STEPS,
        DEFAULT_REFINE_ITERS,
    );
    checks.push(DemoCheck {
        name: "border-brute",
        pass: (0.5223..=0.5226).contains(&brute),
        line: format!("brute-force f̃ = {:.9}  (target [0.5223, 0.5226])", brute),
        data: json!({ "f_bruteforce": brute, "lo": 0.5223, "hi": 0.5226 }),
    });

    let fidelity_improved =
        teleport_fidelity_from_f(f_improved, 2).expect("f from closed form is in range");
    checks.push(DemoCheck {
        name: "border-fidelity",
        pass: (fidelity_improved - 0.681605).abs() <= 1e-5
            && fidelity_improved > classical_fidelity(2),
        line: format!(
            "F̃ = {:.9} > 2/3  (target 0.681605 ± 1e-5)",
            fidelity_improved
        ),
        data: json!({
            "fidelity_improved": fidelity_improved,
            "target": 0.681605,
            "tolerance": 1e-5,
            "classical_fidelity": classical_fidelity(2),
        }),
    });

    let counterexample = counterexample_state();
    let mut max_gain = f64::NEG_INFINITY;
    for variant in Variant::ALL {
        for k in 0..1000 {
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 999.0;
            let gain = delta(&counterexample, variant, theta)
                .expect("counterexample is family form");
            max_gain = max_gain.max(gain);
        }
    }
    checks.push(DemoCheck {
        name: "counterexample",
        pass: max_gain <= 1e-12,
        line: format!(
            "max Δ over 4 variants × 1000 angles = {:.3e}  (target ≤ 1e-12)",
            max_gain
        ),
        data: json!({ "max_delta": max_gain, "tolerance": 1e-12 }),
    });

    let werner = werner_state(0.8);
    let werner_result = max_overlap_sdp(&werner, Subsystem::A, &SdpConfig::default());
    let (werner_pass, werner_line, werner_data) = match &werner_result {
        Ok(result) => (
            (result.value - 0.85).abs() <= 1e-3,
            format!(
                "one-sided optimum = {:.9}  (target 0.850 ± 1e-3, f = 0.85 kept)",
                result.value
            ),
            json!({ "value": result.value, "target": 0.85, "tolerance": 1e-3 }),
        ),
        Err(err) => (
            false,
            format!("optimizer failed: {err}"),
            json!({ "error": err.to_string() }),
        ),
    };
    checks.push(DemoCheck {
        name: "werner-no-gain",
        pass: werner_pass,
        line: werner_line,
        data: werner_data,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let draws = 500;
    let mut above_half = 0usize;
    let mut gained = 0usize;
    let mut sweep_pass = true;
    for _ in 0..draws {
        let params = random_family_params(&mut rng);
        let state = family_state(&params).expect("random family draw is valid");
        let report = best_improvement(&state).expect("family draw is family form");
        if report.f_after_recomputed > report.f_before + 1e-9 {
            gained += 1;
        }
        if report.f_after_recomputed > 0.5 + 1e-9 {
            above_half += 1;
            let reduction = reduction_check(&state);
            let violated = match report.variant.side() {
                Subsystem::A => reduction.min_eig_a < -1e-10,
                Subsystem::B => reduction.min_eig_b < -1e-10,
            };
            if !violated {
                sweep_pass = false;
            }
        }
    }
    checks.push(DemoCheck {
        name: "family-sweep",
        pass: sweep_pass,
        line: format!(
            "{draws} draws, {gained} improved by damping, {above_half} with f̃ > ½, \
             every acting side violates reduction"
        ),
        data: json!({
            "draws": draws,
            "gained": gained,
            "above_half": above_half,
            "seed": 73,
        }),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    text.push_str("reproduction table\n");
    text.push_str("------------------\n");
    for check in &checks {
        text.push_str(&format!(
            "[{}] {:<18} {}\n",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.line
        ));
    }
    if all_pass {
        text.push_str(&format!("all {} checks passed\n", checks.len()));
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        text.push_str(&format!("FAILED checks: {}\n", failed.join(", ")));
    }

    let json = json!({
        "command": "demo",
        "checks": checks
            .iter()
            .map(|c| {
                let mut entry = json!({ "name": c.name, "pass": c.pass });
                entry["data"] = c.data.clone();
                entry
            })
            .collect::<Vec<Value>>(),
        "all_pass": all_pass,
    });
    Report {
        text,
        json,
        exit: if all_pass { 0 } else { 5 },
    }
}

fn werner_state(q: f64) -> TwoQubitState {
    let pure = TwoQubitState::from_pure(&singlet());
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let mixed = if i == j { 0.25 } else { 0.0 };
            m.set(
                i,
                j,
                pure.matrix().get(i, j) * q + Complex64::new(mixed * (1.0 - q), 0.0),
            );
        }
    }
    TwoQubitState::new(m).expect("Werner mixture is a valid state")
}

fn run(cli: Cli) -> u8 {
    let result = match &cli.command {
        Command::Analyze { path } => cmd_analyze(path),
        Command::Canonicalize { path, out } => cmd_canonicalize(path, out.as_deref()),
        Command::ApplyChannel { path, channel, theta, side, out } => {
            cmd_apply_channel(path, *channel, *theta, *side, out.as_deref())
        }
        Command::Improve { path, sweep, channel, theta, side, out } => {
            cmd_improve(path, *sweep, *channel, *theta, *side, out.as_deref())
        }
        Command::Bound { path, side, step_size, max_iters, dykstra_iters, tol, seed } => {
            let config = SdpConfig {
                step_size: *step_size,
                max_iters: *max_iters,
                dykstra_iters: *dykstra_iters,
                tol: *tol,
                seed: *seed,
            };
            cmd_bound(path, *side, &config)
        }
        Command::Teleport { path, samples, seed, workers } => {
            cmd_teleport(path, *samples, *seed, *workers)
        }
        Command::Demo => Ok(cmd_demo()),
    };
    match result {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report.json)
                            .expect("report serializes")
                    );
                }
            }
            report.exit
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli).into());
}
