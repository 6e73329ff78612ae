use serde::{Deserialize, Serialize};

pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "Dr", "Mr", "Mrs", "Ms", "Prof", "Fig", "et al", "e.g", "i.e", "vs",
];

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

/// Rule-based sentence splitter.
///
/// A boundary follows a run of `.`, `!` or `?` (plus closing quotes or
/// brackets) when whitespace and then an uppercase letter or digit come next,
/// optionally behind an opening quote or bracket.
/// A period directly after a listed abbreviation never ends a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSegmenter {
    abbreviations: Vec<String>,
    /// Line breaks always split, and so does any terminator followed by
    /// whitespace, whatever comes next.
    #[serde(default)]
    lenient: bool,
}

impl Default for SentenceSegmenter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSegmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
            lenient: false,
        }
    }

    /// For stitched contexts, whose compressed fragments sit on their own
    /// lines and have usually lost their capitals and terminators.
    pub fn lenient(mut self) -> Self {
        self.lenient = true;
        self
    }

    pub fn segment(&self, text: &str) -> Vec<String> {
        let mut sentences = Vec::new();
        if self.lenient {
            for line in text.lines() {
                self.segment_into(line, &mut sentences);
            }
        } else {
            self.segment_into(text, &mut sentences);
        }
        sentences
    }

    fn segment_into(&self, text: &str, sentences: &mut Vec<String>) {
        let mut start = 0;
        let mut chars = text.char_indices().peekable();

        while let Some((i, c)) = chars.next() {
            if !TERMINATORS.contains(&c) {
                continue;
            }
            let mut end = i + c.len_utf8();
            while let Some(&(j, next)) = chars.peek() {
                if TERMINATORS.contains(&next) || CLOSERS.contains(&next) {
                    end = j + next.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let rest = &text[end..];
            let after = rest.trim_start();
            if after.len() == rest.len() {
                continue;
            }
            let opens_sentence = self.lenient
                || after
                    .trim_start_matches(OPENERS)
                    .chars()
                    .next()
                    .is_some_and(|n| n.is_uppercase() || n.is_ascii_digit());
            if !opens_sentence || (c == '.' && self.is_abbreviation(&text[start..i])) {
                continue;
            }
            push_trimmed(sentences, &text[start..end]);
            start = end;
        }
        push_trimmed(sentences, &text[start..]);
    }

    fn is_abbreviation(&self, before_period: &str) -> bool {
        self.abbreviations.iter().any(|abbr| {
            let Some(prefix_len) = before_period.len().checked_sub(abbr.len()) else {
                return false;
            };
            let Some(tail) = before_period.get(prefix_len..) else {
                return false;
            };
            tail.eq_ignore_ascii_case(abbr)
                && before_period[..prefix_len]
                    .chars()
                    .next_back()
                    .is_none_or(|p| !p.is_alphanumeric())
        })
    }
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

pub fn segment_sentences(text: &str) -> Vec<String> {
    SentenceSegmenter::default().segment(text)
}
