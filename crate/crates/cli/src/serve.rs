//! Length-prefixed guard mode for gateway integration.
//!
//! Each request frame is a 4-byte big-endian payload length followed by the
//! UTF-8 document. Each response frame uses the same framing and carries
//! either a serialized `GuardReport` or `{"frame": N, "error": "..."}`.
//! Frames are numbered from 0 and answered in order.

use std::io::{self, Read, Write};

use piiguard::Guard;
use serde::Serialize;

/// Payloads above this size are discarded and answered with an error frame.
pub const MAX_FRAME_BYTES: u32 = 16 * 1024 * 1024;

#[derive(Debug, Serialize)]
struct ErrorFrame<'a> {
    frame: u64,
    error: &'a str,
}

pub fn write_frame(out: &mut impl Write, payload: &[u8]) -> io::Result<()> {
    let len = u32::try_from(payload.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "frame too large"))?;
    out.write_all(&len.to_be_bytes())?;
    out.write_all(payload)?;
    out.flush()
}

/// Read exactly `buf.len()` bytes. `Ok(false)` on a clean EOF before the
/// first byte.
fn read_full(input: &mut impl Read, buf: &mut [u8]) -> io::Result<bool> {
    let mut filled = 0;
    while filled < buf.len() {
        match input.read(&mut buf[filled..]) {
            Ok(0) if filled == 0 => return Ok(false),
            Ok(0) => return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated frame")),
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

fn error_frame(out: &mut impl Write, frame: u64, error: &str) -> io::Result<()> {
    let body = serde_json::to_vec(&ErrorFrame { frame, error }).expect("error frame serializes");
    write_frame(out, &body)
}

/// Serve until clean end of input. A stream that ends inside a frame gets an
/// error frame and then an `UnexpectedEof` error.
pub fn serve(guard: &Guard, input: &mut impl Read, out: &mut impl Write) -> io::Result<u64> {
    let mut frame = 0u64;
    loop {
        let mut header = [0u8; 4];
        match read_full(input, &mut header) {
            Ok(true) => {}
            Ok(false) => return Ok(frame),
            Err(e) => {
                error_frame(out, frame, "truncated frame header")?;
                return Err(e);
            }
        }
        let len = u32::from_be_bytes(header);
        if len > MAX_FRAME_BYTES {
            // Drain the payload so the next frame stays aligned.
            let copied = io::copy(&mut input.by_ref().take(u64::from(len)), &mut io::sink())?;
            if copied < u64::from(len) {
                error_frame(out, frame, "truncated frame payload")?;
                return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated frame"));
            }
            error_frame(out, frame, &format!("frame of {len} bytes exceeds the {MAX_FRAME_BYTES}-byte limit"))?;
            frame += 1;
            continue;
        }
        let mut payload = vec![0u8; len as usize];
        if len > 0 && !matches!(read_full(input, &mut payload), Ok(true)) {
            error_frame(out, frame, "truncated frame payload")?;
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated frame"));
        }
        match std::str::from_utf8(&payload) {
            Err(_) => error_frame(out, frame, "payload is not valid UTF-8")?,
            Ok(text) => match guard.scan(&format!("frame-{frame}"), text) {
                Ok(report) => write_frame(out, &serde_json::to_vec(&report).expect("report serializes"))?,
                Err(e) => error_frame(out, frame, &e.to_string())?,
            },
        }
        frame += 1;
    }
}

/// Split a response stream back into payloads.
#[cfg(test)]
pub fn read_frames(mut bytes: &[u8]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    while bytes.len() >= 4 {
        let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
        let end = (4 + len).min(bytes.len());
        out.push(bytes[4..end].to_vec());
        bytes = &bytes[end..];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(payload: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        write_frame(&mut v, payload).unwrap();
        v
    }

    #[test]
    fn malformed_frame_does_not_end_stream() {
        let guard = Guard::with_template("gdpr-default").unwrap();
        let mut input = frame(b"Contact me at john.doe@example.com for details.");
        input.extend(frame(&[0xff, 0xfe]));
        input.extend(frame(b"Historical events from 1776 included the Declaration of Independence."));
        let mut out = Vec::new();
        assert_eq!(serve(&guard, &mut input.as_slice(), &mut out).unwrap(), 3);
        let frames = read_frames(&out);
        assert_eq!(frames.len(), 3);
        let v: Vec<serde_json::Value> = frames.iter().map(|f| serde_json::from_slice(f).unwrap()).collect();
        assert_eq!(v[0]["verdict"], "masked");
        assert_eq!(v[1]["frame"], 1);
        assert!(v[1]["error"].as_str().unwrap().contains("UTF-8"));
        assert_eq!(v[2]["verdict"], "pass");
    }

    #[test]
    fn truncated_stream_reports_then_fails() {
        let guard = Guard::with_template("gdpr-default").unwrap();
        let mut input = frame(b"ok.");
        input.extend([0, 0, 0, 10, b'a']);
        let mut out = Vec::new();
        let err = serve(&guard, &mut input.as_slice(), &mut out).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::UnexpectedEof);
        let frames = read_frames(&out);
        assert_eq!(frames.len(), 2);
        assert!(String::from_utf8_lossy(&frames[1]).contains("truncated"));
    }

    #[test]
    fn oversized_frame_is_skipped() {
        let guard = Guard::with_template("gdpr-default").unwrap();
        let mut input = (MAX_FRAME_BYTES + 1).to_be_bytes().to_vec();
        input.extend(std::iter::repeat_n(b'x', (MAX_FRAME_BYTES + 1) as usize));
        input.extend(frame(b"ok."));
        let mut out = Vec::new();
        assert_eq!(serve(&guard, &mut input.as_slice(), &mut out).unwrap(), 2);
        let frames = read_frames(&out);
        assert!(String::from_utf8_lossy(&frames[0]).contains("exceeds"));
        assert!(String::from_utf8_lossy(&frames[1]).contains("\"verdict\""));
    }
}
