use thiserror::Error;

/// Longest body accepted in a single text-mode SMS.
pub const MAX_BODY_LEN: usize = 160;

const CR: u8 = 0x0D;
const CTRL_Z: u8 = 0x1A;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GsmError {
    #[error("invalid recipient {0:?}: expected `+` followed by 7-15 digits")]
    InvalidRecipient(String),
    #[error("body is {0} characters, limit is {MAX_BODY_LEN}")]
    BodyTooLong(usize),
    #[error("body contains non-printable or non-ASCII character at byte {0}")]
    NonAsciiBody(usize),
}

/// A text alert for one recipient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsmAlert {
    recipient: String,
    body: String,
}

impl GsmAlert {
    pub fn new(recipient: impl Into<String>, body: impl Into<String>) -> Result<Self, GsmError> {
        let recipient = recipient.into();
        let body = body.into();
        validate_recipient(&recipient)?;
        validate_body(&body)?;
        Ok(Self { recipient, body })
    }

    pub fn recipient(&self) -> &str {
        &self.recipient
    }

    pub fn body(&self) -> &str {
        &self.body
    }
}

pub fn validate_recipient(recipient: &str) -> Result<(), GsmError> {
    let digits = recipient.strip_prefix('+').unwrap_or("");
    let ok = (7..=15).contains(&digits.len()) && digits.bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(GsmError::InvalidRecipient(recipient.to_string()))
    }
}

pub fn validate_body(body: &str) -> Result<(), GsmError> {
    if let Some(pos) = body.bytes().position(|b| !(0x20..=0x7E).contains(&b)) {
        return Err(GsmError::NonAsciiBody(pos));
    }
    if body.len() > MAX_BODY_LEN {
        return Err(GsmError::BodyTooLong(body.len()));
    }
    Ok(())
}

/// Serial bytes that make a modem send `alert` in SMS text mode:
///
/// ```text
/// AT+CMGF=1<CR>AT+CMGS="<recipient>"<CR><body><Ctrl-Z>
/// ```
///
/// Modem responses are not awaited; the sequence is emitted as one block.
pub fn encode_gsm_at(alert: &GsmAlert) -> Vec<u8> {
    let mut out = Vec::with_capacity(22 + alert.recipient.len() + alert.body.len());
    out.extend_from_slice(b"AT+CMGF=1");
    out.push(CR);
    out.extend_from_slice(b"AT+CMGS=\"");
    out.extend_from_slice(alert.recipient.as_bytes());
    out.push(b'"');
    out.push(CR);
    out.extend_from_slice(alert.body.as_bytes());
    out.push(CTRL_Z);
    out
}
