use serde::Serialize;

/// Byte range `[start_byte, end_byte)` into a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub start_byte: usize,
    pub end_byte: usize,
    /// 1-based line of `start_byte`.
    pub line: u32,
}

impl SourceSpan {
    pub fn new(start_byte: usize, end_byte: usize, line: u32) -> Self {
        SourceSpan {
            start_byte,
            end_byte,
            line,
        }
    }

    pub(crate) fn empty_at(offset: usize, line: u32) -> Self {
        SourceSpan::new(offset, offset, line)
    }

    /// Smallest span covering both.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        let (start_byte, line) = if self.start_byte <= other.start_byte {
            (self.start_byte, self.line)
        } else {
            (other.start_byte, other.line)
        };
        SourceSpan::new(start_byte, self.end_byte.max(other.end_byte), line)
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start_byte <= other.start_byte && other.end_byte <= self.end_byte
    }

    pub fn overlaps(&self, other: &SourceSpan) -> bool {
        self.start_byte < other.end_byte && other.start_byte < self.end_byte
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start_byte..self.end_byte]
    }
}
