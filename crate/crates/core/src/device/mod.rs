//! Encodings of the physical outputs and the board they run on.

mod board;
mod gsm;
mod siren;

pub use board::{
    validate_board, BoardProfile, BoardViolation, UNO_ANALOG_PINS, UNO_CLOCK_HZ, UNO_DIGITAL_PINS,
    UNO_PWM_PINS,
};
pub use gsm::{encode_gsm_at, validate_body, validate_recipient, GsmAlert, GsmError, MAX_BODY_LEN};
pub use siren::{buzzer_signal, SirenPattern};
