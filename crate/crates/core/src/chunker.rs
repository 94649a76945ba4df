//! Separator-based chunking.
//!
//! A chunk ends right after a separator character. A period with ASCII digits
//! on both sides is part of a number, not a separator.

use serde::{Deserialize, Serialize};

use crate::model::TextSpan;

pub const DEFAULT_SEPARATORS: [char; 4] = ['.', '!', '?', '\n'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub span: TextSpan,
    pub index: usize,
    /// The separator that closed this chunk; `None` for an unterminated tail.
    pub terminal_separator: Option<char>,
}

#[derive(Debug, Clone)]
pub struct Chunker {
    separators: Vec<char>,
}

impl Default for Chunker {
    fn default() -> Self {
        Self::new(&DEFAULT_SEPARATORS)
    }
}

impl Chunker {
    pub fn new(separators: &[char]) -> Self {
        Self {
            separators: separators.to_vec(),
        }
    }

    pub fn segment(&self, text: &str) -> Vec<Chunk> {
        let bytes = text.as_bytes();
        let mut chunks = Vec::new();
        let mut start = 0;
        for (i, c) in text.char_indices() {
            if !self.separators.contains(&c) {
                continue;
            }
            if c == '.' && is_decimal_point(bytes, i) {
                continue;
            }
            let end = i + c.len_utf8();
            chunks.push(Chunk {
                span: TextSpan::new(start, end),
                index: chunks.len(),
                terminal_separator: Some(c),
            });
            start = end;
        }
        if start < text.len() {
            chunks.push(Chunk {
                span: TextSpan::new(start, text.len()),
                index: chunks.len(),
                terminal_separator: None,
            });
        }
        chunks
    }
}

/// Segments with the default separator set.
pub fn segment(text: &str) -> Vec<Chunk> {
    Chunker::default().segment(text)
}

fn is_decimal_point(bytes: &[u8], i: usize) -> bool {
    i > 0
        && bytes[i - 1].is_ascii_digit()
        && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())
}

/// Index of the chunk containing byte offset `pos`. Offsets at or past the
/// end map to the last chunk.
pub fn chunk_at(chunks: &[Chunk], pos: usize) -> usize {
    chunks
        .partition_point(|c| c.span.end <= pos)
        .min(chunks.len().saturating_sub(1))
}

/// Chunk index range `[first, last]` a span touches, widened by `radius`
/// chunks on each side and clamped to the document.
pub fn window(chunks: &[Chunk], span: TextSpan, radius: usize) -> (usize, usize) {
    if chunks.is_empty() {
        return (0, 0);
    }
    let first = chunk_at(chunks, span.start);
    let last = chunk_at(chunks, span.end.saturating_sub(1).max(span.start));
    (
        first.saturating_sub(radius),
        (last + radius).min(chunks.len() - 1),
    )
}

/// Byte span covered by chunks `first..=last`.
pub fn window_span(chunks: &[Chunk], (first, last): (usize, usize)) -> TextSpan {
    if chunks.is_empty() {
        return TextSpan::new(0, 0);
    }
    TextSpan::new(chunks[first].span.start, chunks[last].span.end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pieces(text: &str) -> Vec<&str> {
        segment(text).iter().map(|c| c.span.slice(text)).collect()
    }

    #[test]
    fn splits_after_periods() {
        let text = "Alice visited Paris. Contact me.";
        assert_eq!(pieces(text), vec!["Alice visited Paris.", " Contact me."]);
        let chunks = segment(text);
        assert_eq!(chunks[0].terminal_separator, Some('.'));
        assert_eq!(chunks[1].index, 1);
    }

    #[test]
    fn empty_input_has_no_chunks() {
        assert!(segment("").is_empty());
    }

    #[test]
    fn text_without_separators_is_one_tail_chunk() {
        let chunks = segment("no separators here");
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].span, TextSpan::new(0, 18));
        assert_eq!(chunks[0].terminal_separator, None);
    }

    #[test]
    fn decimal_points_do_not_split() {
        assert_eq!(
            pieces("Paid $12,000.50 today. Version 1.2.3 ships"),
            vec!["Paid $12,000.50 today.", " Version 1.2.3 ships"]
        );
    }

    #[test]
    fn newlines_and_punctuation_split() {
        assert_eq!(pieces("a!b?c\nd"), vec!["a!", "b?", "c\n", "d"]);
    }

    #[test]
    fn multibyte_text_is_preserved() {
        let text = "नमस्ते दुनिया. Grüße!";
        assert_eq!(pieces(text).concat(), text);
    }

    #[test]
    fn window_clamps_to_document() {
        let text = "A. B. C. D.";
        let chunks = segment(text);
        assert_eq!(chunks.len(), 4);
        assert_eq!(window(&chunks, TextSpan::new(0, 1), 1), (0, 1));
        assert_eq!(window(&chunks, TextSpan::new(3, 4), 1), (0, 2));
        assert_eq!(window(&chunks, TextSpan::new(9, 10), 1), (2, 3));
    }

    #[test]
    fn custom_separator_set() {
        let chunker = Chunker::new(&[';']);
        let chunks = chunker.segment("a;b. c");
        assert_eq!(chunks.len(), 2);
    }
}
