//! Exact piezoresistor and Wheatstone-bridge circuit model.
//!
//! Each accelerometer output is a full bridge: two voltage dividers between
//! the excitation rail and ground, read differentially at their midpoints.
//! The four standard ways of distributing the eight piezoresistors of the two
//! proof masses over the two bridges are produced by [`standard_configuration`].
//!
//! Bridge outputs are evaluated in closed form without any series expansion.
//! The divider algebra is carried in terms of per-resistor fractional changes
//! so that stress-induced signals of order 1e-6 of the excitation survive
//! subtraction at full relative precision.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::linalg::Vec2;

/// Number of physical piezoresistors on the die.
pub const RESISTOR_COUNT: usize = 8;

/// Default nominal resistance in ohm.
pub const DEFAULT_R0: f64 = 1000.0;

/// Longitudinal and transversal piezoresistance coefficients, in 1/Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiezoCoefficients {
    pi_l: f64,
    pi_t: f64,
}

impl PiezoCoefficients {
    /// Representative p-type silicon values.
    pub const P_TYPE_SILICON: PiezoCoefficients = PiezoCoefficients {
        pi_l: 71.8e-11,
        pi_t: -66.3e-11,
    };

    pub fn new(pi_l: f64, pi_t: f64) -> Result<Self> {
        if !pi_l.is_finite() || !pi_t.is_finite() {
            return Err(invalid("piezo coefficients", "must be finite"));
        }
        if pi_l == pi_t {
            return Err(invalid(
                "piezo coefficients",
                "pi_l == pi_t makes every scale factor singular",
            ));
        }
        Ok(Self { pi_l, pi_t })
    }

    /// Skips the `pi_l != pi_t` check. Scale factors built from such
    /// coefficients are singular; useful only for degenerate-case studies.
    pub const fn new_unchecked(pi_l: f64, pi_t: f64) -> Self {
        Self { pi_l, pi_t }
    }

    pub fn pi_l(&self) -> f64 {
        self.pi_l
    }

    pub fn pi_t(&self) -> f64 {
        self.pi_t
    }

    pub fn for_orientation(&self, orientation: Orientation) -> f64 {
        match orientation {
            Orientation::Longitudinal => self.pi_l,
            Orientation::Transversal => self.pi_t,
        }
    }

    /// `pi_l - pi_t`
    pub fn difference(&self) -> f64 {
        self.pi_l - self.pi_t
    }

    /// `pi_l + pi_t`
    pub fn sum(&self) -> f64 {
        self.pi_l + self.pi_t
    }
}

impl Default for PiezoCoefficients {
    fn default() -> Self {
        Self::P_TYPE_SILICON
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofMass {
    One,
    Two,
}

impl ProofMass {
    pub fn index(self) -> usize {
        match self {
            ProofMass::One => 0,
            ProofMass::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Longitudinal,
    Transversal,
}

impl Orientation {
    pub fn index(self) -> usize {
        match self {
            Orientation::Longitudinal => 0,
            Orientation::Transversal => 1,
        }
    }
}

/// One physical piezoresistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistorSpec {
    proof_mass: ProofMass,
    orientation: Orientation,
    r0: f64,
    slot: usize,
}

impl ResistorSpec {
    pub fn new(
        proof_mass: ProofMass,
        orientation: Orientation,
        r0: f64,
        slot: usize,
    ) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(invalid(
                "nominal resistance",
                format!("{r0} ohm is not positive"),
            ));
        }
        if slot >= RESISTOR_COUNT {
            return Err(invalid(
                "deviation slot",
                format!("{slot} >= {RESISTOR_COUNT}"),
            ));
        }
        Ok(Self {
            proof_mass,
            orientation,
            r0,
            slot,
        })
    }

    pub fn proof_mass(&self) -> ProofMass {
        self.proof_mass
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    /// Relative resistance change `(1+Δ)(1+πσ) - 1`, expanded so small
    /// changes keep full precision.
    fn fractional_change(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
    ) -> f64 {
        let strain_term =
            coeffs.for_orientation(self.orientation) * stresses.for_mass(self.proof_mass);
        let delta = dev.get(self.slot);
        delta + strain_term + delta * strain_term
    }
}

/// Relative deviations Δ_I of the eight physical resistors from nominal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationAssignment {
    delta: [f64; RESISTOR_COUNT],
}

impl DeviationAssignment {
    pub const ZERO: DeviationAssignment = DeviationAssignment {
        delta: [0.0; RESISTOR_COUNT],
    };

    pub fn new(delta: [f64; RESISTOR_COUNT]) -> Result<Self> {
        for (slot, &d) in delta.iter().enumerate() {
            if d <= -1.0 || !d.is_finite() {
                return Err(Error::NonPositiveResistance { slot });
            }
        }
        Ok(Self { delta })
    }

    pub fn get(&self, slot: usize) -> f64 {
        self.delta[slot]
    }

    pub fn as_array(&self) -> &[f64; RESISTOR_COUNT] {
        &self.delta
    }
}

impl Default for DeviationAssignment {
    fn default() -> Self {
        Self::ZERO
    }
}

/// Principal stresses at the base of the two beams, in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressPair {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl StressPair {
    pub const ZERO: StressPair = StressPair {
        sigma1: 0.0,
        sigma2: 0.0,
    };

    pub const fn new(sigma1: f64, sigma2: f64) -> Self {
        Self { sigma1, sigma2 }
    }

    pub fn for_mass(&self, mass: ProofMass) -> f64 {
        match mass {
            ProofMass::One => self.sigma1,
            ProofMass::Two => self.sigma2,
        }
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.sigma1, self.sigma2)
    }
}

impl From<Vec2> for StressPair {
    fn from(v: Vec2) -> Self {
        Self::new(v.x, v.y)
    }
}

/// Bridge supply voltage, in volt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationVoltage(f64);

impl ExcitationVoltage {
    pub fn new(volts: f64) -> Result<Self> {
        if !(volts > 0.0 && volts.is_finite()) {
            return Err(invalid(
                "excitation voltage",
                format!("{volts} V is not positive"),
            ));
        }
        Ok(Self(volts))
    }

    pub fn volts(&self) -> f64 {
        self.0
    }
}

impl Default for ExcitationVoltage {
    fn default() -> Self {
        Self(1.0)
    }
}

/// Two resistors in series from the excitation rail (`top`) to ground (`bottom`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divider {
    pub top: ResistorSpec,
    pub bottom: ResistorSpec,
}

impl Divider {
    pub fn new(top: ResistorSpec, bottom: ResistorSpec) -> Self {
        Self { top, bottom }
    }

    fn resistances(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
    ) -> Leg {
        Leg {
            top_r0: self.top.r0,
            top_u: self.top.fractional_change(coeffs, stresses, dev),
            bottom_r0: self.bottom.r0,
            bottom_u: self.bottom.fractional_change(coeffs, stresses, dev),
        }
    }

    /// Midpoint potential `V_ex · R_bottom / (R_top + R_bottom)`.
    pub fn midpoint(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
        v_ex: ExcitationVoltage,
    ) -> f64 {
        let leg = self.resistances(coeffs, stresses, dev);
        v_ex.0 * leg.bottom() / leg.total()
    }

    fn is_single_mass(&self) -> bool {
        self.top.proof_mass == self.bottom.proof_mass
    }
}

/// Resistor pair in (nominal, fractional change) form.
struct Leg {
    top_r0: f64,
    top_u: f64,
    bottom_r0: f64,
    bottom_u: f64,
}

impl Leg {
    fn top(&self) -> f64 {
        self.top_r0 * (1.0 + self.top_u)
    }

    fn bottom(&self) -> f64 {
        self.bottom_r0 * (1.0 + self.bottom_u)
    }

    fn total(&self) -> f64 {
        self.top() + self.bottom()
    }

    /// `R_bottom - R_top`
    fn imbalance(&self) -> f64 {
        (self.bottom_r0 - self.top_r0) + (self.bottom_r0 * self.bottom_u - self.top_r0 * self.top_u)
    }
}

/// Full Wheatstone bridge; output is `midpoint(divider_1) - midpoint(divider_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeNetwork {
    pub dividers: [Divider; 2],
}

impl BridgeNetwork {
    pub fn new(divider_1: Divider, divider_2: Divider) -> Result<Self> {
        let net = Self {
            dividers: [divider_1, divider_2],
        };
        let slots: Vec<usize> = net.resistors().map(|r| r.slot).collect();
        if has_duplicates(&slots) {
            return Err(invalid(
                "bridge network",
                "the four resistors must be distinct",
            ));
        }
        Ok(net)
    }

    pub fn resistors(&self) -> impl Iterator<Item = &ResistorSpec> {
        self.dividers.iter().flat_map(|d| [&d.top, &d.bottom])
    }

    /// The same bridge read with its dividers exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            dividers: [self.dividers[1], self.dividers[0]],
        }
    }

    /// Exact differential output in volt.
    ///
    /// Evaluates `V_ex (R_b1 R_t2 - R_t1 R_b2) / ((R_t1 + R_b1)(R_t2 + R_b2))`,
    /// which is algebraically identical to the difference of the two divider
    /// ratios. All resistances must be positive.
    pub fn output(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
        v_ex: ExcitationVoltage,
    ) -> f64 {
        let l1 = self.dividers[0].resistances(coeffs, stresses, dev);
        let l2 = self.dividers[1].resistances(coeffs, stresses, dev);

        // R_b1 R_t2 = P (1 + e1), R_t1 R_b2 = Q (1 + e2)
        let p = l1.bottom_r0 * l2.top_r0;
        let q = l1.top_r0 * l2.bottom_r0;
        let e1 = l1.bottom_u + l2.top_u + l1.bottom_u * l2.top_u;
        let e2 = l1.top_u + l2.bottom_u + l1.top_u * l2.bottom_u;
        let numerator = if p == q {
            p * (e1 - e2)
        } else {
            (p - q) + (p * e1 - q * e2)
        };

        v_ex.0 * numerator / (l1.total() * l2.total())
    }

    /// Average midpoint potential relative to `V_ex / 2`.
    pub fn common_mode(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
        v_ex: ExcitationVoltage,
    ) -> f64 {
        // midpoint - V/2 = V (R_b - R_t) / (2 (R_t + R_b))
        let shift: f64 = self
            .dividers
            .iter()
            .map(|d| {
                let leg = d.resistances(coeffs, stresses, dev);
                leg.imbalance() / (2.0 * leg.total())
            })
            .sum();
        0.5 * v_ex.0 * shift
    }
}

/// Exact resistance `R0 (1 + Δ) (1 + π σ)` in ohm.
pub fn resistance_of(
    spec: &ResistorSpec,
    coeffs: &PiezoCoefficients,
    stresses: StressPair,
    deviations: &DeviationAssignment,
) -> f64 {
    let pi = coeffs.for_orientation(spec.orientation);
    spec.r0 * (1.0 + deviations.get(spec.slot)) * (1.0 + pi * stresses.for_mass(spec.proof_mass))
}

pub fn bridge_output_exact(
    net: &BridgeNetwork,
    coeffs: &PiezoCoefficients,
    stresses: StressPair,
    deviations: &DeviationAssignment,
    v_ex: ExcitationVoltage,
) -> f64 {
    net.output(coeffs, stresses, deviations, v_ex)
}

pub fn common_mode_voltage(
    net: &BridgeNetwork,
    coeffs: &PiezoCoefficients,
    stresses: StressPair,
    deviations: &DeviationAssignment,
    v_ex: ExcitationVoltage,
) -> f64 {
    net.common_mode(coeffs, stresses, deviations, v_ex)
}

/// The four bridge configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigId {
    A,
    B,
    C,
    D,
}

impl ConfigId {
    pub const ALL: [ConfigId; 4] = [ConfigId::A, ConfigId::B, ConfigId::C, ConfigId::D];
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConfigId::A => "A",
            ConfigId::B => "B",
            ConfigId::C => "C",
            ConfigId::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for ConfigId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(ConfigId::A),
            "B" | "b" => Ok(ConfigId::B),
            "C" | "c" => Ok(ConfigId::C),
            "D" | "d" => Ok(ConfigId::D),
            other => Err(invalid(
                "configuration",
                format!("unknown configuration `{other}`"),
            )),
        }
    }
}

/// Two bridges sharing the eight resistors of the die.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBridge {
    config: ConfigId,
    bridges: [BridgeNetwork; 2],
}

impl DualBridge {
    pub fn new(config: ConfigId, bridges: [BridgeNetwork; 2]) -> Result<Self> {
        let slots: Vec<usize> = bridges
            .iter()
            .flat_map(|b| b.resistors())
            .map(|r| r.slot)
            .collect();
        if has_duplicates(&slots) {
            return Err(invalid(
                "dual bridge",
                "the two bridges must use eight distinct resistors",
            ));
        }
        Ok(Self { config, bridges })
    }

    pub fn config(&self) -> ConfigId {
        self.config
    }

    pub fn bridges(&self) -> &[BridgeNetwork; 2] {
        &self.bridges
    }

    pub fn resistors(&self) -> impl Iterator<Item = &ResistorSpec> {
        self.bridges.iter().flat_map(|b| b.resistors())
    }

    /// Both bridge outputs `(v1, v2)` in volt.
    pub fn outputs(
        &self,
        coeffs: &PiezoCoefficients,
        stresses: StressPair,
        dev: &DeviationAssignment,
        v_ex: ExcitationVoltage,
    ) -> Vec2 {
        Vec2::new(
            self.bridges[0].output(coeffs, stresses, dev, v_ex),
            self.bridges[1].output(coeffs, stresses, dev, v_ex),
        )
    }

    /// Number of (longitudinal, transversal) resistors.
    pub fn orientation_census(&self) -> (usize, usize) {
        self.resistors()
            .fold((0, 0), |(l, t), r| match r.orientation {
                Orientation::Longitudinal => (l + 1, t),
                Orientation::Transversal => (l, t + 1),
            })
    }

    /// True when every bridge draws all four resistors from one proof mass.
    pub fn bridges_single_mass(&self) -> bool {
        self.bridges.iter().all(|b| {
            let first = b.dividers[0].top.proof_mass;
            b.resistors().all(|r| r.proof_mass == first)
        })
    }

    /// True when every divider contains resistors of both proof masses.
    pub fn dividers_mix_masses(&self) -> bool {
        self.bridges
            .iter()
            .flat_map(|b| b.dividers.iter())
            .all(|d| !d.is_single_mass())
    }

    /// True when every divider uses a single proof mass.
    pub fn dividers_single_mass(&self) -> bool {
        self.bridges
            .iter()
            .flat_map(|b| b.dividers.iter())
            .all(|d| d.is_single_mass())
    }
}

fn has_duplicates(slots: &[usize]) -> bool {
    slots
        .iter()
        .enumerate()
        .any(|(i, s)| slots[..i].contains(s))
}

type Position = (ProofMass, Orientation);

const fn l(mass: ProofMass) -> Position {
    (mass, Orientation::Longitudinal)
}

const fn t(mass: ProofMass) -> Position {
    (mass, Orientation::Transversal)
}

/// Wiring tables as `[bridge][divider] = (top, bottom)`.
fn wiring(id: ConfigId) -> [[(Position, Position); 2]; 2] {
    use ProofMass::{One, Two};
    match id {
        ConfigId::A => [
            [(t(One), l(One)), (l(One), t(One))],
            [(t(Two), l(Two)), (l(Two), t(Two))],
        ],
        // difference bridge, then sum bridge
        ConfigId::B => [
            [(l(Two), l(One)), (t(Two), t(One))],
            [(t(Two), l(One)), (l(Two), t(One))],
        ],
        ConfigId::C => [
            [(l(Two), l(One)), (l(One), l(Two))],
            [(t(Two), l(One)), (l(One), t(Two))],
        ],
        ConfigId::D => [
            [(t(One), l(One)), (t(Two), l(Two))],
            [(t(One), l(One)), (l(Two), t(Two))],
        ],
    }
}

/// Standard wiring with every resistor at [`DEFAULT_R0`].
pub fn standard_configuration(id: ConfigId) -> DualBridge {
    standard_configuration_with_r0(id, DEFAULT_R0).expect("default nominal resistance is valid")
}

/// Standard wiring with a common nominal resistance `r0`.
///
/// Deviation slots are numbered per proof mass in order of appearance:
/// mass 1 owns slots 0..4 and mass 2 owns slots 4..8.
pub fn standard_configuration_with_r0(id: ConfigId, r0: f64) -> Result<DualBridge> {
    let mut next_slot = [0usize, 4usize];
    let mut spec = |(mass, orientation): Position| {
        let slot = next_slot[mass.index()];
        next_slot[mass.index()] += 1;
        ResistorSpec::new(mass, orientation, r0, slot)
    };

    let table = wiring(id);
    let mut bridges = Vec::with_capacity(2);
    for dividers in table {
        let mut built = Vec::with_capacity(2);
        for (top, bottom) in dividers {
            let top = spec(top)?;
            let bottom = spec(bottom)?;
            built.push(Divider::new(top, bottom));
        }
        bridges.push(BridgeNetwork::new(built[0], built[1])?);
    }
    debug_assert_eq!(next_slot, [4, 8]);
    DualBridge::new(id, [bridges[0], bridges[1]])
}
