use std::collections::BTreeSet;
use std::fmt;

pub const UNO_DIGITAL_PINS: usize = 14;
pub const UNO_PWM_PINS: usize = 6;
pub const UNO_ANALOG_PINS: usize = 6;
pub const UNO_CLOCK_HZ: u32 = 16_000_000;

/// Pins claimed by the alert system on the microcontroller board.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardProfile {
    pub digital_pins_used: BTreeSet<u8>,
    pub analog_pins_used: BTreeSet<u8>,
    /// PWM outputs; each must also be claimed as a digital pin.
    pub pwm_pins_used: BTreeSet<u8>,
    pub clock_hz: u32,
}

impl BoardProfile {
    /// Wiring of the alert system: two IR emitters, the buzzer and the motor
    /// driver on digital pins (motor on a PWM pin), the eye and finger
    /// phototransistors on analog inputs.
    pub fn alert_system() -> Self {
        Self {
            digital_pins_used: [2, 4, 8, 9].into(),
            analog_pins_used: [0, 1].into(),
            pwm_pins_used: [9].into(),
            clock_hz: UNO_CLOCK_HZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoardViolation {
    Digital { used: usize, limit: usize },
    Analog { used: usize, limit: usize },
    Pwm { used: usize, limit: usize },
    PwmNotDigital { pins: Vec<u8> },
    Clock { hz: u32, expected: u32 },
}

impl fmt::Display for BoardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoardViolation::Digital { used, limit } => write!(f, "digital {used} > {limit}"),
            BoardViolation::Analog { used, limit } => write!(f, "analog {used} > {limit}"),
            BoardViolation::Pwm { used, limit } => write!(f, "pwm {used} > {limit}"),
            BoardViolation::PwmNotDigital { pins } => {
                write!(f, "pwm pins {pins:?} not in digital set")
            }
            BoardViolation::Clock { hz, expected } => write!(f, "clock {hz} Hz != {expected} Hz"),
        }
    }
}

/// Checks a profile against the Arduino Uno's resources, reporting every
/// violated limit.
pub fn validate_board(profile: &BoardProfile) -> Result<(), Vec<BoardViolation>> {
    let mut violations = Vec::new();
    let digital = profile.digital_pins_used.len();
    if digital > UNO_DIGITAL_PINS {
        violations.push(BoardViolation::Digital { used: digital, limit: UNO_DIGITAL_PINS });
    }
    let analog = profile.analog_pins_used.len();
    if analog > UNO_ANALOG_PINS {
        violations.push(BoardViolation::Analog { used: analog, limit: UNO_ANALOG_PINS });
    }
    let pwm = profile.pwm_pins_used.len();
    if pwm > UNO_PWM_PINS {
        violations.push(BoardViolation::Pwm { used: pwm, limit: UNO_PWM_PINS });
    }
    let stray: Vec<u8> = profile.pwm_pins_used.difference(&profile.digital_pins_used).copied().collect();
    if !stray.is_empty() {
        violations.push(BoardViolation::PwmNotDigital { pins: stray });
    }
    if profile.clock_hz != UNO_CLOCK_HZ {
        violations.push(BoardViolation::Clock { hz: profile.clock_hz, expected: UNO_CLOCK_HZ });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pins(n: u8) -> BTreeSet<u8> {
        (0..n).collect()
    }

    #[test]
    fn alert_system_profile_fits() {
        assert_eq!(validate_board(&BoardProfile::alert_system()), Ok(()));
    }

    #[test]
    fn too_many_digital() {
        let p = BoardProfile { digital_pins_used: pins(15), ..BoardProfile::alert_system() };
        let v = validate_board(&p).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "digital 15 > 14");
    }

    #[test]
    fn too_many_pwm() {
        let p = BoardProfile {
            digital_pins_used: pins(7),
            pwm_pins_used: pins(7),
            ..BoardProfile::alert_system()
        };
        let v = validate_board(&p).unwrap_err();
        assert_eq!(v.iter().map(ToString::to_string).collect::<Vec<_>>(), vec!["pwm 7 > 6"]);
    }

    #[test]
    fn reports_every_violation() {
        let p = BoardProfile {
            digital_pins_used: pins(20),
            analog_pins_used: pins(8),
            pwm_pins_used: (10..30).collect(),
            clock_hz: 8_000_000,
        };
        let v = validate_board(&p).unwrap_err();
        assert_eq!(v.len(), 5);
    }
}
