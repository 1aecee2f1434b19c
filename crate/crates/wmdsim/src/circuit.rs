//! Electrical description of the wireless-drive network and the resonance
//! design rules that populate it.
//!
//! All quantities are SI (henries, farads, ohms, hertz). The network is a
//! value object: once built it is immutable and freely shareable between
//! threads; fault scenarios and sweeps derive modified copies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// ω = 2πf.
#[inline]
pub fn angular_frequency(frequency: f64) -> f64 {
    2.0 * PI * frequency
}

/// One physical coil: inductance and its series AC resistance at the nominal
/// operating frequency (single-valued; no skin-effect model).
#[derive(Debug, Clone, PartialEq)]
pub struct CoilSpec {
    pub inductance: f64,
    pub ac_resistance: f64,
    pub label: String,
}

impl CoilSpec {
    pub fn new(inductance: f64, ac_resistance: f64, label: impl Into<String>) -> Result<Self> {
        if !(inductance > 0.0) {
            return Err(Error::domain("coil inductance must be > 0"));
        }
        if !(ac_resistance >= 0.0) {
            return Err(Error::domain("coil AC resistance must be >= 0"));
        }
        Ok(Self {
            inductance,
            ac_resistance,
            label: label.into(),
        })
    }
}

/// A single series matching capacitor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCompensation {
    pub capacitance: f64,
}

impl SeriesCompensation {
    pub fn new(capacitance: f64) -> Result<Self> {
        if !(capacitance > 0.0) {
            return Err(Error::domain("series capacitance must be > 0"));
        }
        Ok(Self { capacitance })
    }
}

/// Receiver-side LCC network: series capacitor on the coil, parallel filter
/// capacitor, and a filter inductor in series with the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LccCompensation {
    pub series_capacitance: f64,
    pub filter_capacitance: f64,
    pub filter_inductance: f64,
    pub filter_resistance: f64,
}

impl LccCompensation {
    pub fn new(
        series_capacitance: f64,
        filter_capacitance: f64,
        filter_inductance: f64,
        filter_resistance: f64,
    ) -> Result<Self> {
        if !(series_capacitance > 0.0 && filter_capacitance > 0.0 && filter_inductance > 0.0) {
            return Err(Error::domain(
                "LCC capacitances and filter inductance must be > 0",
            ));
        }
        if !(filter_resistance >= 0.0) {
            return Err(Error::domain("filter resistance must be >= 0"));
        }
        Ok(Self {
            series_capacitance,
            filter_capacitance,
            filter_inductance,
            filter_resistance,
        })
    }

    /// Equivalent inductance of the coil + series capacitor branch at ω:
    /// L_rme = L_coil − 1/(ω²·C_series).
    pub fn equivalent_inductance(&self, coil_inductance: f64, frequency: f64) -> f64 {
        let w = angular_frequency(frequency);
        coil_inductance - 1.0 / (w * w * self.series_capacitance)
    }
}

/// How the receiver coil is matched to the rectifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReceiverCompensation {
    Series(SeriesCompensation),
    Lcc(LccCompensation),
}

/// Magnetic coupling between two named coils.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingLink {
    pub mutual_inductance: f64,
    pub endpoint_a: String,
    pub endpoint_b: String,
}

impl CouplingLink {
    pub fn new(
        mutual_inductance: f64,
        endpoint_a: impl Into<String>,
        endpoint_b: impl Into<String>,
    ) -> Result<Self> {
        if !(mutual_inductance >= 0.0) {
            return Err(Error::domain("mutual inductance must be >= 0"));
        }
        Ok(Self {
            mutual_inductance,
            endpoint_a: endpoint_a.into(),
            endpoint_b: endpoint_b.into(),
        })
    }
}

/// DC supply limits at the transmitter side (the system's only protection).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcSource {
    pub voltage_limit: f64,
    pub current_limit: f64,
}

impl DcSource {
    pub fn new(voltage_limit: f64, current_limit: f64) -> Result<Self> {
        if !(voltage_limit > 0.0 && current_limit > 0.0) {
            return Err(Error::domain("source limits must be > 0"));
        }
        Ok(Self {
            voltage_limit,
            current_limit,
        })
    }
}

/// DC-equivalent motor load. Open circuit is a dedicated marker so fault
/// scenarios stay exact instead of leaning on a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotorLoad {
    Resistance(f64),
    Open,
}

impl MotorLoad {
    pub fn resistance(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::domain(
                "motor load resistance must be finite and >= 0 (use MotorLoad::Open for an open circuit)",
            ));
        }
        Ok(MotorLoad::Resistance(r))
    }

    pub fn is_open(&self) -> bool {
        matches!(self, MotorLoad::Open)
    }

    /// Equivalent AC load before the rectifier: 8·R_L/π², or `Open`.
    pub fn ac_equivalent(&self) -> AcLoad {
        match *self {
            MotorLoad::Resistance(r) => AcLoad::Resistance(8.0 * r / (PI * PI)),
            MotorLoad::Open => AcLoad::Open,
        }
    }
}

/// AC-side load seen by the compensation network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcLoad {
    Resistance(f64),
    Open,
}

impl AcLoad {
    /// DC-side motor resistance that maps to this AC load (inverse of the
    /// 8/π² rectifier relation).
    pub fn dc_equivalent(&self) -> MotorLoad {
        match *self {
            AcLoad::Resistance(r) => MotorLoad::Resistance(r * PI * PI / 8.0),
            AcLoad::Open => MotorLoad::Open,
        }
    }
}

/// One underground drive unit: hybrid repeater (two coils joined in one
/// series loop, so a single loop current flows through both), in-pipe
/// receiver, and its motor load.
#[derive(Debug, Clone, PartialEq)]
pub struct WmdUnit {
    pub label: String,
    pub repeater_coil_1: CoilSpec,
    pub repeater_cap_1: SeriesCompensation,
    pub repeater_coil_2: CoilSpec,
    pub repeater_cap_2: SeriesCompensation,
    pub receiver_coil: CoilSpec,
    pub receiver_compensation: ReceiverCompensation,
    pub motor: MotorLoad,
    /// Transmitter ↔ repeater part 1 coupling (zero for idling units).
    pub link_to_transmitter: CouplingLink,
    /// Repeater part 2 ↔ receiver coupling.
    pub link_repeater_to_receiver: CouplingLink,
}

/// Full network: source, transmitter tank, and every drive unit (motoring
/// and idling) at the nominal operating frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDescription {
    pub source: DcSource,
    pub transmitter_coil: CoilSpec,
    pub transmitter_cap: SeriesCompensation,
    pub units: Vec<WmdUnit>,
    pub nominal_frequency: f64,
}

impl NetworkDescription {
    pub fn new(
        source: DcSource,
        transmitter_coil: CoilSpec,
        transmitter_cap: SeriesCompensation,
        units: Vec<WmdUnit>,
        nominal_frequency: f64,
    ) -> Result<Self> {
        let net = Self {
            source,
            transmitter_coil,
            transmitter_cap,
            units,
            nominal_frequency,
        };
        net.check_invariants()?;
        Ok(net)
    }

    fn check_invariants(&self) -> Result<()> {
        if !(self.nominal_frequency > 0.0) {
            return Err(Error::domain("nominal frequency must be > 0"));
        }
        if self.units.is_empty() {
            return Err(Error::domain("network needs at least one drive unit"));
        }
        let coupled = self
            .units
            .iter()
            .filter(|u| u.link_to_transmitter.mutual_inductance > 0.0)
            .count();
        if coupled != 1 {
            return Err(Error::domain(format!(
                "exactly one unit may couple to the transmitter (found {coupled})"
            )));
        }
        for u in &self.units {
            let m1 = u.link_to_transmitter.mutual_inductance;
            let max1 = (self.transmitter_coil.inductance * u.repeater_coil_1.inductance).sqrt();
            if m1 > max1 {
                return Err(Error::Model(format!(
                    "unit '{}': transmitter coupling {m1:.3e} H exceeds sqrt(L_t*L_1) = {max1:.3e} H",
                    u.label
                )));
            }
            let m2 = u.link_repeater_to_receiver.mutual_inductance;
            let max2 = (u.repeater_coil_2.inductance * u.receiver_coil.inductance).sqrt();
            if m2 > max2 {
                return Err(Error::Model(format!(
                    "unit '{}': receiver coupling {m2:.3e} H exceeds sqrt(L_2*L_r) = {max2:.3e} H",
                    u.label
                )));
            }
        }
        Ok(())
    }

    /// Index and reference of the single unit coupled to the transmitter.
    pub fn motoring_unit(&self) -> (usize, &WmdUnit) {
        self.units
            .iter()
            .enumerate()
            .find(|(_, u)| u.link_to_transmitter.mutual_inductance > 0.0)
            .expect("validated network has exactly one motoring unit")
    }

    /// Copy with the motoring unit's load replaced.
    pub fn with_motor_load(&self, load: MotorLoad) -> Self {
        let mut net = self.clone();
        let idx = net.motoring_unit().0;
        net.units[idx].motor = load;
        net
    }

    /// Copy with the motoring unit's two couplings scaled (used by the
    /// mutual-inductance sweep comparisons).
    pub fn with_scaled_couplings(&self, scale: f64) -> Result<Self> {
        if !(scale >= 0.0) {
            return Err(Error::domain("coupling scale must be >= 0"));
        }
        let mut net = self.clone();
        let idx = net.motoring_unit().0;
        net.units[idx].link_to_transmitter.mutual_inductance *= scale;
        net.units[idx].link_repeater_to_receiver.mutual_inductance *= scale;
        net.check_invariants()?;
        Ok(net)
    }

    /// Copy with the motoring unit's receiver compensation replaced.
    pub fn with_receiver_compensation(&self, comp: ReceiverCompensation) -> Self {
        let mut net = self.clone();
        let idx = net.motoring_unit().0;
        net.units[idx].receiver_compensation = comp;
        net
    }

    /// Ideal variant: every parasitic resistance zeroed and every capacitor
    /// re-derived from the resonance design rules, so the network is exactly
    /// resonant at the nominal frequency. This is the limit in which the
    /// transmitter/receiver current ratio equals M_2r/M_1t.
    pub fn idealized_lossless(&self) -> Self {
        let f = self.nominal_frequency;
        let mut net = self.clone();
        net.transmitter_coil.ac_resistance = 0.0;
        net.transmitter_cap.capacitance =
            design_series_cap(net.transmitter_coil.inductance, f).expect("valid inductance");
        for u in &mut net.units {
            u.repeater_coil_1.ac_resistance = 0.0;
            u.repeater_coil_2.ac_resistance = 0.0;
            u.receiver_coil.ac_resistance = 0.0;
            u.repeater_cap_1.capacitance =
                design_series_cap(u.repeater_coil_1.inductance, f).expect("valid inductance");
            u.repeater_cap_2.capacitance =
                design_series_cap(u.repeater_coil_2.inductance, f).expect("valid inductance");
            u.receiver_compensation = match u.receiver_compensation {
                ReceiverCompensation::Series(_) => ReceiverCompensation::Series(
                    SeriesCompensation::new(
                        design_series_cap(u.receiver_coil.inductance, f).expect("valid inductance"),
                    )
                    .expect("positive"),
                ),
                ReceiverCompensation::Lcc(lcc) => {
                    let rho = lcc.filter_inductance / u.receiver_coil.inductance;
                    let mut designed =
                        design_lcc(u.receiver_coil.inductance, f, rho).expect("valid ratio");
                    designed.filter_resistance = 0.0;
                    ReceiverCompensation::Lcc(designed)
                }
            };
        }
        net
    }
}

/// Series matching capacitor for a coil: C = 1/(ω²L).
pub fn design_series_cap(inductance: f64, frequency: f64) -> Result<f64> {
    if !(inductance > 0.0 && frequency > 0.0) {
        return Err(Error::domain(
            "design_series_cap needs inductance > 0 and frequency > 0",
        ));
    }
    let w = angular_frequency(frequency);
    Ok(1.0 / (w * w * inductance))
}

/// LCC design for a receiver coil at the given filter ratio ρ = L_fm/L_rm:
/// L_fm = ρ·L_rm, C_fm = 1/(ω²·L_fm), C_rm = 1/(ω²·(L_rm − L_fm)).
/// By construction the equivalent inductance L_rme = L_rm − 1/(ω²·C_rm)
/// equals L_fm, which is what gives the load-independent output current.
pub fn design_lcc(coil_inductance: f64, frequency: f64, filter_ratio: f64) -> Result<LccCompensation> {
    if !(coil_inductance > 0.0 && frequency > 0.0) {
        return Err(Error::domain(
            "design_lcc needs inductance > 0 and frequency > 0",
        ));
    }
    if !(filter_ratio > 0.0 && filter_ratio < 1.0) {
        return Err(Error::domain("filter ratio must lie in (0, 1)"));
    }
    let w = angular_frequency(frequency);
    let l_fm = filter_ratio * coil_inductance;
    let c_fm = 1.0 / (w * w * l_fm);
    let c_rm = 1.0 / (w * w * (coil_inductance - l_fm));
    LccCompensation::new(c_rm, c_fm, l_fm, 0.0)
}

/// Equivalent AC load of the motor before rectification: R_Le = 8·R_L/π².
pub fn equivalent_ac_load(r_l: f64) -> Result<f64> {
    if !(r_l >= 0.0) {
        return Err(Error::domain("motor load resistance must be >= 0"));
    }
    Ok(8.0 * r_l / (PI * PI))
}

// Prototype catalog values (Table I of the built 150 cm system).
pub const TABLE1_FREQUENCY: f64 = 85.0e3;
pub const TABLE1_E: f64 = 110.0;
pub const TABLE1_I_LIMIT: f64 = 7.0;
pub const TABLE1_L_T: f64 = 86.84e-6;
pub const TABLE1_R_T: f64 = 0.085;
pub const TABLE1_C_T_PRINTED: f64 = 40.58e-9;
pub const TABLE1_L_1M: f64 = 86.22e-6;
pub const TABLE1_L_2M: f64 = 86.21e-6;
pub const TABLE1_R_1M: f64 = 0.085;
pub const TABLE1_R_2M: f64 = 0.085;
pub const TABLE1_C_1M_PRINTED: f64 = 40.68e-9;
pub const TABLE1_C_2M_PRINTED: f64 = 40.81e-9;
pub const TABLE1_L_RM: f64 = 72.30e-6;
pub const TABLE1_R_RM: f64 = 0.08;
pub const TABLE1_C_RM_PRINTED: f64 = 96.98e-9;
pub const TABLE1_L_FM: f64 = 36.15e-6;
pub const TABLE1_R_FM: f64 = 0.02;
pub const TABLE1_C_FM_PRINTED: f64 = 96.98e-9;
pub const TABLE1_M_1TM: f64 = 13.56e-6;
pub const TABLE1_M_1TI: f64 = 0.0;
pub const TABLE1_M_2RM: f64 = 21.44e-6;
pub const TABLE1_M_2RI: f64 = 21.44e-6;
/// Rated motor operating point: 87.7 V / 7.2 A.
pub const TABLE1_RATED_R_L: f64 = 87.7 / 7.2;

fn table1_with_caps(c_t: f64, c_1m: f64, c_2m: f64, c_rm: f64, c_fm: f64) -> NetworkDescription {
    let unit = |label: &str, m_1t: f64, m_2r: f64| WmdUnit {
        label: label.to_string(),
        repeater_coil_1: CoilSpec::new(TABLE1_L_1M, TABLE1_R_1M, format!("L_1{label}")).unwrap(),
        repeater_cap_1: SeriesCompensation::new(c_1m).unwrap(),
        repeater_coil_2: CoilSpec::new(TABLE1_L_2M, TABLE1_R_2M, format!("L_2{label}")).unwrap(),
        repeater_cap_2: SeriesCompensation::new(c_2m).unwrap(),
        receiver_coil: CoilSpec::new(TABLE1_L_RM, TABLE1_R_RM, format!("L_r{label}")).unwrap(),
        receiver_compensation: ReceiverCompensation::Lcc(
            LccCompensation::new(c_rm, c_fm, TABLE1_L_FM, TABLE1_R_FM).unwrap(),
        ),
        motor: MotorLoad::Resistance(TABLE1_RATED_R_L),
        link_to_transmitter: CouplingLink::new(m_1t, "L_t", format!("L_1{label}")).unwrap(),
        link_repeater_to_receiver: CouplingLink::new(m_2r, format!("L_2{label}"), format!("L_r{label}"))
            .unwrap(),
    };
    NetworkDescription::new(
        DcSource::new(TABLE1_E, TABLE1_I_LIMIT).unwrap(),
        CoilSpec::new(TABLE1_L_T, TABLE1_R_T, "L_t").unwrap(),
        SeriesCompensation::new(c_t).unwrap(),
        vec![unit("m", TABLE1_M_1TM, TABLE1_M_2RM), unit("i", TABLE1_M_1TI, TABLE1_M_2RI)],
        TABLE1_FREQUENCY,
    )
    .expect("catalog network is valid")
}

/// The built prototype's network: one motoring unit (M_1t = 13.56 µH), one
/// idling unit (M_1t = 0), 85.0 kHz, 110 V / 7 A source, rated motor load.
///
/// Capacitances are derived from the resonance design rules so the model is
/// exactly resonant at 85.0 kHz. The catalog prints its capacitances rounded
/// to four digits (up to 0.5% off the design values); taken literally those
/// roundings detune the tanks enough to shift fault-case currents by more
/// than an order of magnitude. Use [`table1_printed`] for the rounded values.
pub fn table1_preset() -> NetworkDescription {
    table1_with_caps(
        design_series_cap(TABLE1_L_T, TABLE1_FREQUENCY).unwrap(),
        design_series_cap(TABLE1_L_1M, TABLE1_FREQUENCY).unwrap(),
        design_series_cap(TABLE1_L_2M, TABLE1_FREQUENCY).unwrap(),
        design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 0.5).unwrap().series_capacitance,
        design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 0.5).unwrap().filter_capacitance,
    )
}

/// Same network with the capacitances exactly as the catalog prints them
/// (C_t = 40.58 nF, C_1m = 40.68 nF, C_2m = 40.81 nF, C_rm = C_fm = 96.98 nF).
/// Detunes the tanks by up to 0.26%; see [`validate_network`].
pub fn table1_printed() -> NetworkDescription {
    table1_with_caps(
        TABLE1_C_T_PRINTED,
        TABLE1_C_1M_PRINTED,
        TABLE1_C_2M_PRINTED,
        TABLE1_C_RM_PRINTED,
        TABLE1_C_FM_PRINTED,
    )
}

/// One finding from [`validate_network`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// A resonant tank whose natural frequency misses the nominal one.
    Detuning {
        tank: String,
        resonant_frequency: f64,
        relative_detuning: f64,
    },
    /// A mutual inductance implying coupling coefficient > 1.
    CouplingViolation { link: String, coefficient: f64 },
}

impl Diagnostic {
    pub fn relative_detuning(&self) -> Option<f64> {
        match self {
            Diagnostic::Detuning {
                relative_detuning, ..
            } => Some(*relative_detuning),
            _ => None,
        }
    }
}

fn tank_diag(label: &str, l: f64, c: f64, f_nominal: f64) -> Diagnostic {
    let f_tank = 1.0 / (2.0 * PI * (l * c).sqrt());
    Diagnostic::Detuning {
        tank: label.to_string(),
        resonant_frequency: f_tank,
        relative_detuning: (f_tank - f_nominal).abs() / f_nominal,
    }
}

/// Numerical resonance check of every tank plus coupling-coefficient sanity.
/// Diagnostics, not failures: callers decide what detuning they tolerate.
pub fn validate_network(net: &NetworkDescription) -> Vec<Diagnostic> {
    let f = net.nominal_frequency;
    let mut out = vec![tank_diag(
        "transmitter",
        net.transmitter_coil.inductance,
        net.transmitter_cap.capacitance,
        f,
    )];
    for u in &net.units {
        out.push(tank_diag(
            &format!("{}.repeater_1", u.label),
            u.repeater_coil_1.inductance,
            u.repeater_cap_1.capacitance,
            f,
        ));
        out.push(tank_diag(
            &format!("{}.repeater_2", u.label),
            u.repeater_coil_2.inductance,
            u.repeater_cap_2.capacitance,
            f,
        ));
        match u.receiver_compensation {
            ReceiverCompensation::Series(cap) => out.push(tank_diag(
                &format!("{}.receiver", u.label),
                u.receiver_coil.inductance,
                cap.capacitance,
                f,
            )),
            ReceiverCompensation::Lcc(lcc) => {
                out.push(tank_diag(
                    &format!("{}.receiver_filter", u.label),
                    lcc.filter_inductance,
                    lcc.filter_capacitance,
                    f,
                ));
                // The L_rme/C_fm tank: Z_Lrme must cancel Z_Cfm at resonance.
                let l_rme = lcc.equivalent_inductance(u.receiver_coil.inductance, f);
                if l_rme > 0.0 {
                    out.push(tank_diag(
                        &format!("{}.receiver_equivalent", u.label),
                        l_rme,
                        lcc.filter_capacitance,
                        f,
                    ));
                }
            }
        }
        let k1 = u.link_to_transmitter.mutual_inductance
            / (net.transmitter_coil.inductance * u.repeater_coil_1.inductance).sqrt();
        if k1 > 1.0 {
            out.push(Diagnostic::CouplingViolation {
                link: format!("{} <-> transmitter", u.label),
                coefficient: k1,
            });
        }
        let k2 = u.link_repeater_to_receiver.mutual_inductance
            / (u.repeater_coil_2.inductance * u.receiver_coil.inductance).sqrt();
        if k2 > 1.0 {
            out.push(Diagnostic::CouplingViolation {
                link: format!("{} <-> receiver", u.label),
                coefficient: k2,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON config format. Field names mirror the catalog symbols with the unit
// embedded (L_t_uH, C_t_nF, M_1t_uH, ...); the loader converts to SI.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SourceJson {
    #[serde(rename = "E_V")]
    e_v: f64,
    #[serde(rename = "I_limit_A")]
    i_limit_a: f64,
}

#[derive(Serialize, Deserialize)]
struct TransmitterJson {
    #[serde(rename = "L_t_uH")]
    l_t_uh: f64,
    #[serde(rename = "R_t_ohm")]
    r_t_ohm: f64,
    #[serde(rename = "C_t_nF")]
    c_t_nf: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CompensationJson {
    Series {
        #[serde(rename = "C_nF")]
        c_nf: f64,
    },
    Lcc {
        #[serde(rename = "C_rm_nF")]
        c_rm_nf: f64,
        #[serde(rename = "C_fm_nF")]
        c_fm_nf: f64,
        #[serde(rename = "L_fm_uH")]
        l_fm_uh: f64,
        #[serde(rename = "R_fm_ohm")]
        r_fm_ohm: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LoadJson {
    Ohms(f64),
    Marker(String),
}

#[derive(Serialize, Deserialize)]
struct UnitJson {
    label: String,
    #[serde(rename = "L_1m_uH")]
    l_1_uh: f64,
    #[serde(rename = "R_1m_ohm")]
    r_1_ohm: f64,
    #[serde(rename = "C_1m_nF")]
    c_1_nf: f64,
    #[serde(rename = "L_2m_uH")]
    l_2_uh: f64,
    #[serde(rename = "R_2m_ohm")]
    r_2_ohm: f64,
    #[serde(rename = "C_2m_nF")]
    c_2_nf: f64,
    #[serde(rename = "L_rm_uH")]
    l_r_uh: f64,
    #[serde(rename = "R_rm_ohm")]
    r_r_ohm: f64,
    compensation: CompensationJson,
    #[serde(rename = "R_L_ohm")]
    r_l_ohm: LoadJson,
    #[serde(rename = "M_1t_uH")]
    m_1t_uh: f64,
    #[serde(rename = "M_2r_uH")]
    m_2r_uh: f64,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    #[serde(rename = "f_kHz")]
    f_khz: f64,
    source: SourceJson,
    transmitter: TransmitterJson,
    units: Vec<UnitJson>,
}

const UH: f64 = 1e-6;
const NF: f64 = 1e-9;
const KHZ: f64 = 1e3;

/// Serialize a network to the unit-suffixed JSON config format.
pub fn to_json(net: &NetworkDescription) -> Result<String> {
    let doc = NetworkJson {
        f_khz: net.nominal_frequency / KHZ,
        source: SourceJson {
            e_v: net.source.voltage_limit,
            i_limit_a: net.source.current_limit,
        },
        transmitter: TransmitterJson {
            l_t_uh: net.transmitter_coil.inductance / UH,
            r_t_ohm: net.transmitter_coil.ac_resistance,
            c_t_nf: net.transmitter_cap.capacitance / NF,
        },
        units: net
            .units
            .iter()
            .map(|u| UnitJson {
                label: u.label.clone(),
                l_1_uh: u.repeater_coil_1.inductance / UH,
                r_1_ohm: u.repeater_coil_1.ac_resistance,
                c_1_nf: u.repeater_cap_1.capacitance / NF,
                l_2_uh: u.repeater_coil_2.inductance / UH,
                r_2_ohm: u.repeater_coil_2.ac_resistance,
                c_2_nf: u.repeater_cap_2.capacitance / NF,
                l_r_uh: u.receiver_coil.inductance / UH,
                r_r_ohm: u.receiver_coil.ac_resistance,
                compensation: match u.receiver_compensation {
                    ReceiverCompensation::Series(c) => CompensationJson::Series {
                        c_nf: c.capacitance / NF,
                    },
                    ReceiverCompensation::Lcc(l) => CompensationJson::Lcc {
                        c_rm_nf: l.series_capacitance / NF,
                        c_fm_nf: l.filter_capacitance / NF,
                        l_fm_uh: l.filter_inductance / UH,
                        r_fm_ohm: l.filter_resistance,
                    },
                },
                r_l_ohm: match u.motor {
                    MotorLoad::Resistance(r) => LoadJson::Ohms(r),
                    MotorLoad::Open => LoadJson::Marker("open".to_string()),
                },
                m_1t_uh: u.link_to_transmitter.mutual_inductance / UH,
                m_2r_uh: u.link_repeater_to_receiver.mutual_inductance / UH,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parse a network from the unit-suffixed JSON config format.
pub fn from_json(text: &str) -> Result<NetworkDescription> {
    let doc: NetworkJson = serde_json::from_str(text)?;
    let units = doc
        .units
        .into_iter()
        .map(|u| -> Result<WmdUnit> {
            let motor = match u.r_l_ohm {
                LoadJson::Ohms(r) => MotorLoad::resistance(r)?,
                LoadJson::Marker(m) if m == "open" => MotorLoad::Open,
                LoadJson::Marker(m) => {
                    return Err(Error::Config(format!(
                        "unknown R_L_ohm marker '{m}' (expected a number or \"open\")"
                    )))
                }
            };
            Ok(WmdUnit {
                repeater_coil_1: CoilSpec::new(u.l_1_uh * UH, u.r_1_ohm, format!("L_1{}", u.label))?,
                repeater_cap_1: SeriesCompensation::new(u.c_1_nf * NF)?,
                repeater_coil_2: CoilSpec::new(u.l_2_uh * UH, u.r_2_ohm, format!("L_2{}", u.label))?,
                repeater_cap_2: SeriesCompensation::new(u.c_2_nf * NF)?,
                receiver_coil: CoilSpec::new(u.l_r_uh * UH, u.r_r_ohm, format!("L_r{}", u.label))?,
                receiver_compensation: match u.compensation {
                    CompensationJson::Series { c_nf } => {
                        ReceiverCompensation::Series(SeriesCompensation::new(c_nf * NF)?)
                    }
                    CompensationJson::Lcc {
                        c_rm_nf,
                        c_fm_nf,
                        l_fm_uh,
                        r_fm_ohm,
                    } => ReceiverCompensation::Lcc(LccCompensation::new(
                        c_rm_nf * NF,
                        c_fm_nf * NF,
                        l_fm_uh * UH,
                        r_fm_ohm,
                    )?),
                },
                motor,
                link_to_transmitter: CouplingLink::new(u.m_1t_uh * UH, "L_t", format!("L_1{}", u.label))?,
                link_repeater_to_receiver: CouplingLink::new(
                    u.m_2r_uh * UH,
                    format!("L_2{}", u.label),
                    format!("L_r{}", u.label),
                )?,
                label: u.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkDescription::new(
        DcSource::new(doc.source.e_v, doc.source.i_limit_a)?,
        CoilSpec::new(doc.transmitter.l_t_uh * UH, doc.transmitter.r_t_ohm, "L_t")?,
        SeriesCompensation::new(doc.transmitter.c_t_nf * NF)?,
        units,
        doc.f_khz * KHZ,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const REL: f64 = 1e-12;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn series_cap_matches_catalog_within_one_percent() {
        // 86.84 uH @ 85 kHz -> 40.37 nF, within 1% of the printed 40.58 nF
        let c = design_series_cap(TABLE1_L_T, TABLE1_FREQUENCY).unwrap();
        assert!(rel_err(c, 40.372217e-9) < 1e-6, "designed C_t = {c:e}");
        assert!(rel_err(c, TABLE1_C_T_PRINTED) < 0.01);

        // 86.22 uH -> 40.66 nF vs printed 40.68 nF
        let c1 = design_series_cap(TABLE1_L_1M, TABLE1_FREQUENCY).unwrap();
        assert!(rel_err(c1, 40.662530e-9) < 1e-6, "designed C_1m = {c1:e}");
        assert!(rel_err(c1, TABLE1_C_1M_PRINTED) < 0.01);
    }

    #[test]
    fn series_cap_round_trips_to_the_design_frequency() {
        let c = design_series_cap(86.84e-6, 85.0e3).unwrap();
        let f_back = 1.0 / (2.0 * PI * (86.84e-6 * c).sqrt());
        assert!(rel_err(f_back, 85.0e3) < REL);
    }

    #[test]
    fn series_cap_rejects_non_positive_inputs() {
        assert!(design_series_cap(0.0, 85.0e3).is_err());
        assert!(design_series_cap(86.84e-6, -1.0).is_err());
    }

    #[test]
    fn lcc_design_reproduces_catalog_triplet() {
        let lcc = design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 0.5).unwrap();
        assert!(rel_err(lcc.filter_inductance, 36.15e-6) < REL);
        assert!(rel_err(lcc.filter_capacitance, 96.982664e-9) < 1e-6);
        assert!(rel_err(lcc.series_capacitance, 96.982664e-9) < 1e-6);
        // printed values match the design to 4 significant digits
        assert!(rel_err(lcc.filter_capacitance, TABLE1_C_FM_PRINTED) < 5e-4);
        assert!(rel_err(lcc.series_capacitance, TABLE1_C_RM_PRINTED) < 5e-4);
    }

    #[test]
    fn lcc_design_quarter_ratio() {
        let lcc = design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 0.25).unwrap();
        assert!(rel_err(lcc.filter_inductance, 18.075e-6) < REL);
        assert!(rel_err(lcc.filter_capacitance, 2.0 * 96.982664e-9) < 1e-6);
        let w = angular_frequency(TABLE1_FREQUENCY);
        assert!(rel_err(lcc.series_capacitance, 1.0 / (w * w * 54.225e-6)) < REL);
    }

    #[test]
    fn lcc_identities_hold_to_machine_precision() {
        for rho in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let lcc = design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, rho).unwrap();
            let w = angular_frequency(TABLE1_FREQUENCY);
            // omega = 1/sqrt(L_fm C_fm)
            let w_filter = 1.0 / (lcc.filter_inductance * lcc.filter_capacitance).sqrt();
            assert!(rel_err(w_filter, w) < REL);
            // L_rme = L_fm (the Z_Lrme = Z_Lfm = -Z_Cfm identity)
            let l_rme = lcc.equivalent_inductance(TABLE1_L_RM, TABLE1_FREQUENCY);
            assert!(rel_err(l_rme, lcc.filter_inductance) < REL);
        }
    }

    #[test]
    fn lcc_rejects_bad_filter_ratio() {
        assert!(design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 0.0).is_err());
        assert!(design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, 1.0).is_err());
        assert!(design_lcc(TABLE1_L_RM, TABLE1_FREQUENCY, -0.5).is_err());
    }

    #[test]
    fn ac_load_mapping() {
        assert!(rel_err(equivalent_ac_load(25.0).unwrap(), 20.264236728467555) < 1e-12);
        assert_eq!(equivalent_ac_load(0.0).unwrap(), 0.0);
        // rated point read off the measured 87.7 V / 7.2 A
        let r_le = equivalent_ac_load(TABLE1_RATED_R_L).unwrap();
        assert!(rel_err(r_le, 9.872736134109394) < 1e-12);
        assert!(equivalent_ac_load(-1.0).is_err());
        // the open-circuit marker survives the mapping
        assert_eq!(MotorLoad::Open.ac_equivalent(), AcLoad::Open);
    }

    #[test]
    fn preset_reproduces_catalog_inductances_and_limits() {
        let net = table1_preset();
        assert_eq!(net.transmitter_coil.inductance, 86.84e-6);
        assert_eq!(net.nominal_frequency, 85.0e3);
        assert_eq!(net.source.voltage_limit, 110.0);
        assert_eq!(net.source.current_limit, 7.0);
        let (_, motoring) = net.motoring_unit();
        assert_eq!(motoring.link_to_transmitter.mutual_inductance, 13.56e-6);
        assert_eq!(motoring.link_repeater_to_receiver.mutual_inductance, 21.44e-6);
        let idle = net.units.iter().find(|u| u.label == "i").unwrap();
        assert_eq!(idle.link_to_transmitter.mutual_inductance, 0.0);
        assert_eq!(idle.link_repeater_to_receiver.mutual_inductance, 21.44e-6);
    }

    #[test]
    fn printed_variant_reproduces_every_catalog_number_verbatim() {
        let net = table1_printed();
        assert_eq!(net.transmitter_coil.inductance, 86.84e-6);
        assert_eq!(net.transmitter_coil.ac_resistance, 0.085);
        assert_eq!(net.transmitter_cap.capacitance, 40.58e-9);
        assert_eq!(net.nominal_frequency, 85.0e3);
        assert_eq!(net.source.voltage_limit, 110.0);
        assert_eq!(net.source.current_limit, 7.0);
        for u in &net.units {
            assert_eq!(u.repeater_coil_1.inductance, 86.22e-6);
            assert_eq!(u.repeater_coil_2.inductance, 86.21e-6);
            assert_eq!(u.repeater_cap_1.capacitance, 40.68e-9);
            assert_eq!(u.repeater_cap_2.capacitance, 40.81e-9);
            assert_eq!(u.repeater_coil_1.ac_resistance, 0.085);
            assert_eq!(u.repeater_coil_2.ac_resistance, 0.085);
            assert_eq!(u.receiver_coil.inductance, 72.30e-6);
            assert_eq!(u.receiver_coil.ac_resistance, 0.08);
            match u.receiver_compensation {
                ReceiverCompensation::Lcc(lcc) => {
                    assert_eq!(lcc.series_capacitance, 96.98e-9);
                    assert_eq!(lcc.filter_capacitance, 96.98e-9);
                    assert_eq!(lcc.filter_inductance, 36.15e-6);
                    assert_eq!(lcc.filter_resistance, 0.02);
                }
                _ => panic!("catalog receiver is LCC-compensated"),
            }
        }
    }

    #[test]
    fn preset_capacitances_stay_close_to_printed_values() {
        let tuned = table1_preset();
        let printed = table1_printed();
        let dev = rel_err(
            tuned.transmitter_cap.capacitance,
            printed.transmitter_cap.capacitance,
        );
        assert!(dev < 0.006, "C_t design/printed deviation {dev}");
    }

    #[test]
    fn preset_passes_validation_under_one_percent() {
        for net in [table1_preset(), table1_printed()] {
            let worst = validate_network(&net)
                .iter()
                .filter_map(|d| d.relative_detuning())
                .fold(0.0_f64, f64::max);
            assert!(worst < 0.01, "worst detuning {worst}");
        }
    }

    #[test]
    fn doubling_c_t_detunes_by_one_minus_inv_sqrt2() {
        let mut net = table1_preset();
        net.transmitter_cap.capacitance *= 2.0;
        let diags = validate_network(&net);
        let d = diags
            .iter()
            .find_map(|d| match d {
                Diagnostic::Detuning {
                    tank,
                    relative_detuning,
                    ..
                } if tank == "transmitter" => Some(*relative_detuning),
                _ => None,
            })
            .unwrap();
        let expected = 1.0 - 1.0 / 2.0_f64.sqrt();
        assert!(rel_err(d, expected) < 1e-9, "detuning {d} vs {expected}");
    }

    #[test]
    fn coupling_violation_is_flagged() {
        let mut net = table1_preset();
        let idx = net.motoring_unit().0;
        let max = (net.transmitter_coil.inductance * net.units[idx].repeater_coil_1.inductance)
            .sqrt();
        net.units[idx].link_to_transmitter.mutual_inductance = 1.1 * max;
        let diags = validate_network(&net);
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::CouplingViolation { coefficient, .. } if *coefficient > 1.0)));
        // and the constructor refuses such a network outright
        assert!(NetworkDescription::new(
            net.source,
            net.transmitter_coil.clone(),
            net.transmitter_cap,
            net.units.clone(),
            net.nominal_frequency
        )
        .is_err());
    }

    #[test]
    fn exactly_one_motoring_unit_enforced() {
        let net = table1_preset();
        let mut units = net.units.clone();
        units[1].link_to_transmitter.mutual_inductance = 1.0e-6;
        assert!(NetworkDescription::new(
            net.source,
            net.transmitter_coil.clone(),
            net.transmitter_cap,
            units,
            net.nominal_frequency
        )
        .is_err());
    }

    #[test]
    fn idealized_lossless_zeroes_resistance_and_retunes() {
        let ideal = table1_printed().idealized_lossless();
        assert_eq!(ideal.transmitter_coil.ac_resistance, 0.0);
        let worst = validate_network(&ideal)
            .iter()
            .filter_map(|d| d.relative_detuning())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-12, "ideal variant detuning {worst}");
    }

    #[test]
    fn json_round_trip_preserves_network() {
        let net = table1_preset();
        let text = to_json(&net).unwrap();
        // field names carry their units
        assert!(text.contains("\"L_t_uH\": 86.84"));
        assert!(text.contains("\"M_1t_uH\": 13.56"));
        assert!(text.contains("\"f_kHz\": 85.0"));
        let back = from_json(&text).unwrap();
        assert!(rel_err(back.transmitter_coil.inductance, net.transmitter_coil.inductance) < 1e-12);
        assert!(
            rel_err(back.transmitter_cap.capacitance, net.transmitter_cap.capacitance) < 1e-12
        );
        assert_eq!(back.units.len(), net.units.len());
    }

    #[test]
    fn json_open_circuit_marker() {
        let net = table1_preset().with_motor_load(MotorLoad::Open);
        let text = to_json(&net).unwrap();
        assert!(text.contains("\"open\""));
        let back = from_json(&text).unwrap();
        assert!(back.motoring_unit().1.motor.is_open());
    }
}
