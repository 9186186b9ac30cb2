//! Threshold readout and the two classical logic machines built on the
//! driven two-level system: a CNOT-like gate and a serial parity checker.
//!
//! The pulse (on/off) is the control bit, the prepared basis state is the
//! target bit. After the drive the final populations give the target bit
//! and the transverse Bloch magnitude C = 2|ρ₀₁| gives the coherence bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dissipation::{integrate_dissipative, RelaxationRates};
use crate::drive::{DetuningLaw, DriveConfig};
use crate::error::{Error, Result};
use crate::observables::{bloch_to_density, DensityMatrix2};
use crate::propagators::integrate_reference;
use crate::scalar::Real;
use crate::state::CoherenceVector;

/// Integration tolerance used for every gate evaluation.
pub const GATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn is_one(self) -> bool {
        self == Bit::One
    }
}

impl std::ops::BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit::from_bool(self != rhs)
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::InvalidArgument(format!("{v} is not a bit"))),
        }
    }
}

impl TryFrom<char> for Bit {
    type Error = Error;
    fn try_from(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Bit::Zero),
            '1' => Ok(Bit::One),
            _ => Err(Error::InvalidArgument(format!("'{c}' is not a bit"))),
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<Bit>> {
    s.chars().map(Bit::try_from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicConfig<T> {
    /// A population at or above this value selects its level as the bit.
    pub population_threshold: T,
    /// Minimum C = 2|ρ₀₁| read as coherence bit 1.
    pub coherence_threshold: T,
    /// Pulse area (radians) applied when the pulse bit is 1.
    pub gate_pulse_area: T,
}

impl<T: Real> Default for LogicConfig<T> {
    fn default() -> Self {
        Self {
            population_threshold: T::lit(0.6),
            coherence_threshold: T::lit(0.5),
            gate_pulse_area: T::lit(2.0),
        }
    }
}

impl<T: Real> LogicConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let p = self.population_threshold;
        if !(p > T::lit(0.5) && p <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "population threshold {p} outside (0.5, 1]"
            )));
        }
        let c = self.coherence_threshold;
        if !(c > T::zero() && c <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "coherence threshold {c} outside (0, 1]"
            )));
        }
        let a = self.gate_pulse_area;
        if !(a.is_finite() && a > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "gate pulse area {a} must be positive"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicResult<T> {
    /// `None` when neither population reaches the threshold.
    pub final_bit: Option<Bit>,
    pub coherence_bit: Bit,
    pub rho00: T,
    pub rho11: T,
    /// C = 2|ρ₀₁|.
    pub coherence: T,
}

impl<T> LogicResult<T> {
    pub fn is_indeterminate(&self) -> bool {
        self.final_bit.is_none()
    }
}

pub fn readout<T: Real>(rho: &DensityMatrix2<T>, cfg: &LogicConfig<T>) -> LogicResult<T> {
    let thr = cfg.population_threshold;
    let final_bit = if rho.rho11 >= thr {
        Some(Bit::One)
    } else if rho.rho00 >= thr {
        Some(Bit::Zero)
    } else {
        None
    };
    let coherence = rho.coherence_magnitude();
    LogicResult {
        final_bit,
        coherence_bit: Bit::from_bool(coherence >= cfg.coherence_threshold),
        rho00: rho.rho00,
        rho11: rho.rho11,
        coherence,
    }
}

/// Sin² resonance pulse on [0, 4] with the default gate area.
pub fn default_gate_drive<T: Real>() -> DriveConfig<T> {
    DriveConfig::sin_squared_pulse(T::lit(2.0), T::lit(4.0), DetuningLaw::Constant(T::zero()))
        .expect("static drive parameters are valid")
}

/// Runs one gate: the drive is rescaled to the configured area when the
/// pulse bit is 1 and switched off otherwise. Returns the full readout.
pub fn gate_readout<T: Real>(
    pulse_on: Bit,
    initial: Bit,
    cfg: &LogicConfig<T>,
    drive: &DriveConfig<T>,
    rates: Option<&RelaxationRates<T>>,
) -> Result<LogicResult<T>> {
    cfg.validate()?;
    let run = match pulse_on {
        Bit::One => drive.with_area(cfg.gate_pulse_area)?,
        Bit::Zero => drive.switched_off(),
    };
    let g0 = match initial {
        Bit::Zero => CoherenceVector::ground(),
        Bit::One => CoherenceVector::excited(),
    };
    let tol = T::lit(GATE_TOL);
    let g = match rates {
        Some(r) if !r.is_zero() => integrate_dissipative(&run, r, &g0, tol)?.end(),
        _ => integrate_reference(&run, &g0, tol)?.end(),
    };
    Ok(readout(&bloch_to_density(&g)?, cfg))
}

/// (coherence_bit, final_bit) of the gate; an indeterminate population
/// readout is a gate failure.
pub fn cnot_evaluate<T: Real>(
    pulse_on: Bit,
    initial: Bit,
    cfg: &LogicConfig<T>,
    drive: &DriveConfig<T>,
    rates: Option<&RelaxationRates<T>>,
) -> Result<(Bit, Bit)> {
    let r = gate_readout(pulse_on, initial, cfg, drive, rates)?;
    match r.final_bit {
        Some(fb) => Ok((r.coherence_bit, fb)),
        None => Err(Error::GateFailure {
            pulse: pulse_on.as_u8(),
            initial: initial.as_u8(),
            rho00: r.rho00.as_f64(),
            rho11: r.rho11.as_f64(),
            coherence: r.coherence.as_f64(),
        }),
    }
}

/// (pulse, initial) → (coherence, final).
pub const CNOT_TABLE: [((Bit, Bit), (Bit, Bit)); 4] = [
    ((Bit::Zero, Bit::Zero), (Bit::Zero, Bit::Zero)),
    ((Bit::Zero, Bit::One), (Bit::Zero, Bit::One)),
    ((Bit::One, Bit::Zero), (Bit::One, Bit::One)),
    ((Bit::One, Bit::One), (Bit::One, Bit::Zero)),
];

/// (present state, input) → (next state, output).
pub const PARITY_TABLE: [((Bit, Bit), (Bit, Bit)); 4] = [
    ((Bit::Zero, Bit::Zero), (Bit::Zero, Bit::Zero)),
    ((Bit::Zero, Bit::One), (Bit::One, Bit::Zero)),
    ((Bit::One, Bit::Zero), (Bit::One, Bit::One)),
    ((Bit::One, Bit::One), (Bit::Zero, Bit::One)),
];

fn table_lookup(table: &[((Bit, Bit), (Bit, Bit)); 4], key: (Bit, Bit)) -> (Bit, Bit) {
    table
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .expect("table is complete")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnotRow<T> {
    pub pulse: Bit,
    pub initial: Bit,
    pub readout: LogicResult<T>,
    pub expected: (Bit, Bit),
}

impl<T> CnotRow<T> {
    pub fn matches(&self) -> bool {
        self.readout.final_bit == Some(self.expected.1)
            && self.readout.coherence_bit == self.expected.0
    }
}

/// Evaluates all four input combinations. Indeterminate rows are returned
/// rather than raised so the whole table can be inspected.
pub fn cnot_truth_table<T: Real>(
    cfg: &LogicConfig<T>,
    drive: &DriveConfig<T>,
    rates: Option<&RelaxationRates<T>>,
) -> Result<Vec<CnotRow<T>>> {
    CNOT_TABLE
        .iter()
        .map(|&((pulse, initial), expected)| {
            let readout = gate_readout(pulse, initial, cfg, drive, rates)?;
            Ok(CnotRow {
                pulse,
                initial,
                readout,
                expected,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityRow<T> {
    pub present: Bit,
    pub input: Bit,
    pub next: Bit,
    pub output: Bit,
    pub rho00: T,
    pub rho11: T,
    pub coherence: T,
}

impl<T> ParityRow<T> {
    pub fn matches_table(&self) -> bool {
        table_lookup(&PARITY_TABLE, (self.present, self.input)) == (self.next, self.output)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityMachineState<T> {
    /// Current parity: even (pulse off) or odd (pulse on).
    pub state: Bit,
    pub transcript: Vec<ParityRow<T>>,
}

impl<T> ParityMachineState<T> {
    pub fn all_rows_match(&self) -> bool {
        self.transcript.iter().all(ParityRow::matches_table)
    }
}

/// Feeds `bits` through the serial parity machine starting from even
/// parity. Each step prepares the input as the initial state, applies the
/// pulse iff the machine is odd, and reads the next state and output from
/// the gate.
pub fn parity_check<T: Real>(
    bits: &[Bit],
    cfg: &LogicConfig<T>,
    drive: &DriveConfig<T>,
    rates: Option<&RelaxationRates<T>>,
) -> Result<(Bit, ParityMachineState<T>)> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument(
            "parity check needs at least one bit".into(),
        ));
    }
    // the gate is deterministic, so each (state, input) pair is simulated once
    let mut cache: [[Option<(Bit, LogicResult<T>)>; 2]; 2] = [[None; 2]; 2];
    let mut machine = ParityMachineState {
        state: Bit::Zero,
        transcript: Vec::with_capacity(bits.len()),
    };
    for &input in bits {
        let present = machine.state;
        let slot = &mut cache[present as usize][input as usize];
        let (next, r) = match slot {
            Some(hit) => *hit,
            None => {
                let r = gate_readout(present, input, cfg, drive, rates)?;
                let next = r.final_bit.ok_or(Error::GateFailure {
                    pulse: present.as_u8(),
                    initial: input.as_u8(),
                    rho00: r.rho00.as_f64(),
                    rho11: r.rho11.as_f64(),
                    coherence: r.coherence.as_f64(),
                })?;
                *slot = Some((next, r));
                (next, r)
            }
        };
        machine.transcript.push(ParityRow {
            present,
            input,
            next,
            output: r.coherence_bit,
            rho00: r.rho00,
            rho11: r.rho11,
            coherence: r.coherence,
        });
        machine.state = next;
    }
    Ok((machine.state, machine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn rho(r00: f64, r11: f64, c: f64) -> DensityMatrix2<f64> {
        DensityMatrix2::new(r00, r11, Complex::new(c / 2.0, 0.0))
    }

    #[test]
    fn readout_rules() {
        let cfg = LogicConfig::default();
        let s = 1f64.sin();
        let r = readout(&rho(1.0 - s * s, s * s, 2f64.sin()), &cfg);
        assert_eq!((r.final_bit, r.coherence_bit), (Some(Bit::One), Bit::One));
        let r = readout(&DensityMatrix2::ground(), &cfg);
        assert_eq!((r.final_bit, r.coherence_bit), (Some(Bit::Zero), Bit::Zero));
        let r = readout(&rho(0.5, 0.5, 1.0), &cfg);
        assert!(r.is_indeterminate());
        assert_eq!(r.coherence_bit, Bit::One);
    }

    #[test]
    fn config_ranges() {
        assert!(LogicConfig::<f64>::default().validate().is_ok());
        let bad = LogicConfig {
            population_threshold: 0.5,
            ..LogicConfig::<f64>::default()
        };
        assert!(bad.validate().is_err());
        let bad = LogicConfig {
            coherence_threshold: 0.0,
            ..LogicConfig::<f64>::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cnot_rows() {
        let cfg = LogicConfig::default();
        let drive = default_gate_drive::<f64>();
        for &((p, i), expect) in &CNOT_TABLE {
            assert_eq!(cnot_evaluate(p, i, &cfg, &drive, None).unwrap(), expect);
        }
    }

    #[test]
    fn quarter_area_pulse_is_indeterminate() {
        let cfg = LogicConfig {
            gate_pulse_area: std::f64::consts::FRAC_PI_2,
            ..LogicConfig::default()
        };
        let err =
            cnot_evaluate(Bit::One, Bit::Zero, &cfg, &default_gate_drive(), None).unwrap_err();
        assert!(matches!(
            err,
            Error::GateFailure {
                pulse: 1,
                initial: 0,
                ..
            }
        ));
    }

    #[test]
    fn parity_examples() {
        let cfg = LogicConfig::default();
        let drive = default_gate_drive::<f64>();
        let (p, m) = parity_check(&parse_bits("1011").unwrap(), &cfg, &drive, None).unwrap();
        assert_eq!(p, Bit::One);
        assert_eq!(m.transcript.len(), 4);
        assert!(m.all_rows_match());
        let (p, m) = parity_check(&[Bit::Zero, Bit::Zero], &cfg, &drive, None).unwrap();
        assert_eq!(p, Bit::Zero);
        for row in &m.transcript {
            assert_eq!(
                (row.present, row.input, row.next, row.output),
                (Bit::Zero, Bit::Zero, Bit::Zero, Bit::Zero)
            );
        }
        let (p, m) = parity_check(&[Bit::One], &cfg, &drive, None).unwrap();
        assert_eq!(p, Bit::One);
        let row = m.transcript[0];
        assert_eq!(
            (row.present, row.input, row.next, row.output),
            (Bit::Zero, Bit::One, Bit::One, Bit::Zero)
        );
        assert!(parity_check(&[], &cfg, &drive, None).is_err());
    }

    #[test]
    fn strong_dephasing_breaks_the_gate() {
        let drive = default_gate_drive::<f64>();
        let rates = RelaxationRates::dephasing(5.0 / (2.0 * drive.duration()));
        let err = cnot_evaluate(
            Bit::One,
            Bit::Zero,
            &LogicConfig::default(),
            &drive,
            Some(&rates),
        );
        assert!(matches!(err, Err(Error::GateFailure { .. })));
    }

    #[test]
    fn bits_parse() {
        assert_eq!(parse_bits("10").unwrap(), vec![Bit::One, Bit::Zero]);
        assert!(parse_bits("102").is_err());
        assert_eq!(Bit::One ^ Bit::One, Bit::Zero);
    }
}
