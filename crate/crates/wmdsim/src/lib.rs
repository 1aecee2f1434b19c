//! Simulator and design toolkit for a meter-range wireless motor drive.
//!
//! The system under study is a resonant inductive power link: a full-bridge
//! inverter drives a series-compensated transmitter coil, a two-coil hybrid
//! repeater relays the field across meter-scale distances, and an in-pipe
//! receiver with an LCC compensation network feeds a diode rectifier and a
//! brushed PM DC motor. Output is regulated by pulse-frequency modulation
//! (mixing inverter periods at `f` and `f/3`), and the only protection is a
//! DC-side voltage/current limiter at the transmitter.
//!
//! Two engines cross-validate each other:
//!
//! * [`phasor`] — steady-state frequency-domain mesh solver (exact complex
//!   linear solve of the coupled loops, plus the reduced reflected-load
//!   chain), with frequency/load sweep drivers.
//! * [`transient`] — fixed-step RK4 switched-circuit integration of the same
//!   network through the rectifier nonlinearity down to the motor shaft.
//!
//! [`circuit`] holds the network description and the resonance design rules,
//! [`pfm`] the modulation pattern synthesis and harmonic analysis,
//! [`scenario`] the fault-tolerance drills and efficiency reports, and
//! [`cli`] the command-line front end used by the `wmdsim` binary.

pub mod circuit;
pub mod cli;
pub mod pfm;
pub mod phasor;
pub mod report;
pub mod scenario;
pub mod transient;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// The mesh impedance matrix could not be factored.
    #[error("singular mesh matrix: {0}")]
    SingularMatrix(String),
    /// |I_rm| = 0, so the transmitter/receiver current ratio is undefined.
    #[error("current ratio undefined: receiver current is zero")]
    UndefinedRatio,
    /// The physical model is inconsistent (e.g. coupling above unity).
    #[error("model error: {0}")]
    Model(String),
    /// A run configuration could not be interpreted.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by bad user input rather than failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
