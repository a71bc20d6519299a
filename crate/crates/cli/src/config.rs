//! Command-line flags and the equivalent JSON config file.
//!
//! Every subcommand accepts `--config <file>`: a flat JSON object whose keys
//! are the long flag names (`"alpha-re"`, `"t-steps"`, ...). Flags given on
//! the command line win over file values; unknown keys are rejected.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qenergy_core::everett_toy::ToyParams;
use qenergy_core::spin_protocol::{
    Propagator, ProtocolParams, DEFAULT_STEPS, DEFAULT_WINDOW_TRANSITS,
};
use qenergy_core::C64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::spin::SpinSettings;
use crate::sweep::{Axis, Spacing, SweepSettings};
use crate::toy::ToySettings;
use crate::validate::Faults;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qenergy",
    version,
    about = "Energy bookkeeping for branching and spin-probe simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-level system branching into a three-level environment.
    Toy(ToyArgs),
    /// Spin probe flying past a spin in a field, then measured along y.
    Spin(SpinArgs),
    /// Late-time entanglement and energy shift over a (b, v) grid.
    Sweep(SweepArgs),
    /// Runs the acceptance criteria and prints a pass/fail table.
    Validate(ValidateArgs),
}

trait Layered: Sized + DeserializeOwned {
    fn config_path(&self) -> Option<&PathBuf>;
    fn over(self, file: Self) -> Self;

    fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config_path() else {
            return Ok(self);
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(self.over(file))
    }
}

macro_rules! layered {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl Layered for $ty {
            fn config_path(&self) -> Option<&PathBuf> {
                self.config.as_ref()
            }

            fn over(self, file: Self) -> Self {
                Self {
                    config: self.config,
                    $($field: self.$field.or(file.$field),)*
                }
            }
        }

        impl $ty {
            /// Merges in the `--config` file, if any.
            pub fn resolve(self) -> Result<Self, CliError> {
                Layered::resolve(self)
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ToyArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_im: Option<f64>,
    /// Energy of system level 1.
    #[arg(long, allow_negative_numbers = true)]
    pub e1: Option<f64>,
    /// Energy of system level 2.
    #[arg(long, allow_negative_numbers = true)]
    pub e2: Option<f64>,
    /// System–environment coupling rate.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Last sample time (default: 2·t* = π/λ).
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of equally spaced sample times in [0, t-max].
    #[arg(long)]
    pub t_steps: Option<usize>,
}

layered!(ToyArgs {
    output,
    alpha_re,
    alpha_im,
    beta_re,
    beta_im,
    e1,
    e2,
    lambda,
    t_max,
    t_steps
});

impl ToyArgs {
    pub fn settings(&self) -> Result<ToySettings, CliError> {
        let alpha = C64::new(
            self.alpha_re.unwrap_or(FRAC_1_SQRT_2),
            self.alpha_im.unwrap_or(0.0),
        );
        let beta = C64::new(
            self.beta_re.unwrap_or(FRAC_1_SQRT_2),
            self.beta_im.unwrap_or(0.0),
        );
        let params = ToyParams::new(
            alpha,
            beta,
            self.e1.unwrap_or(1.0),
            self.e2.unwrap_or(3.0),
            self.lambda.unwrap_or(1.0),
        )
        .map_err(CliError::config)?;
        let t_max = self.t_max.unwrap_or(2.0 * params.decoherence_time());
        let t_steps = self.t_steps.unwrap_or(101);
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(CliError::Config(format!(
                "t-max must be finite and non-negative, got {t_max}"
            )));
        }
        if t_steps == 0 {
            return Err(CliError::Config("t-steps must be at least 1".into()));
        }
        Ok(ToySettings {
            params,
            t_max,
            t_steps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorChoice {
    Magnus1,
    Ordered,
}

impl From<PropagatorChoice> for Propagator {
    fn from(p: PropagatorChoice) -> Self {
        match p {
            PropagatorChoice::Magnus1 => Propagator::Magnus1,
            PropagatorChoice::Ordered => Propagator::Ordered,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SpinArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Dipole coupling constant.
    #[arg(long)]
    pub g: Option<f64>,
    /// Impact parameter.
    #[arg(long)]
    pub b: Option<f64>,
    /// Probe speed, fraction of c.
    #[arg(long)]
    pub v: Option<f64>,
    /// Larmor frequency of the stationary spin.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Initial precession phase.
    #[arg(long, allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    /// Window start (default −200·b/v).
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Window end (default +200·b/v).
    #[arg(long, allow_negative_numbers = true)]
    pub tf: Option<f64>,
    /// Seed for the probe readout.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Time steps for the ordered propagator.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub propagator: Option<PropagatorChoice>,
    /// Trajectory rows.
    #[arg(long)]
    pub samples: Option<usize>,
}

layered!(SpinArgs {
    output,
    g,
    b,
    v,
    omega,
    phi0,
    t0,
    tf,
    seed,
    steps,
    propagator,
    samples
});

impl SpinArgs {
    pub fn settings(&self) -> Result<SpinSettings, CliError> {
        let (g, b, v) = (
            self.g.unwrap_or(1.0),
            self.b.unwrap_or(1.0),
            self.v.unwrap_or(0.5),
        );
        let half = if v > 0.0 {
            DEFAULT_WINDOW_TRANSITS * b / v
        } else {
            f64::NAN
        };
        let params = ProtocolParams::with_window(
            g,
            b,
            v,
            self.omega.unwrap_or(2.0),
            self.phi0.unwrap_or(0.0),
            self.t0.unwrap_or(-half),
            self.tf.unwrap_or(half),
        )
        .map_err(CliError::config)?;
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        let samples = self.samples.unwrap_or(201);
        if steps < 2 {
            return Err(CliError::Config(format!(
                "steps must be at least 2, got {steps}"
            )));
        }
        if samples < 2 {
            return Err(CliError::Config(format!(
                "samples must be at least 2, got {samples}"
            )));
        }
        Ok(SpinSettings {
            params,
            seed: self.seed.unwrap_or(0),
            steps,
            propagator: self.propagator.unwrap_or(PropagatorChoice::Magnus1).into(),
            samples,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingChoice {
    Linear,
    Log,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SweepArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub b_min: Option<f64>,
    #[arg(long)]
    pub b_max: Option<f64>,
    #[arg(long)]
    pub b_count: Option<usize>,
    #[arg(long)]
    pub v_min: Option<f64>,
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub v_count: Option<usize>,
    /// Grid spacing along both axes.
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingChoice>,
}

layered!(SweepArgs {
    output,
    g,
    omega,
    phi0,
    b_min,
    b_max,
    b_count,
    v_min,
    v_max,
    v_count,
    spacing
});

impl SweepArgs {
    pub fn settings(&self) -> Result<SweepSettings, CliError> {
        let spacing = match self.spacing.unwrap_or(SpacingChoice::Linear) {
            SpacingChoice::Linear => Spacing::Linear,
            SpacingChoice::Log => Spacing::Log,
        };
        let b = Axis::new(
            "b",
            self.b_min.unwrap_or(0.5),
            self.b_max.unwrap_or(2.0),
            self.b_count.unwrap_or(7),
            spacing,
        )?;
        let v = Axis::new(
            "v",
            self.v_min.unwrap_or(0.1),
            self.v_max.unwrap_or(0.9),
            self.v_count.unwrap_or(9),
            spacing,
        )?;
        let settings = SweepSettings {
            g: self.g.unwrap_or(1.0),
            omega: self.omega.unwrap_or(2.0),
            phi0: self.phi0.unwrap_or(0.0),
            b,
            v,
        };
        settings.check()?;
        Ok(settings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultChoice {
    /// Flip the sign of ξ on the closed-form side of the quadrature check.
    XiSign,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ValidateArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run only criteria whose group, name or number matches.
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultChoice>,
}

layered!(ValidateArgs {
    output,
    filter,
    inject_fault
});

impl ValidateArgs {
    pub fn faults(&self) -> Faults {
        Faults {
            xi_sign: self.inject_fault == Some(FaultChoice::XiSign),
        }
    }
}
