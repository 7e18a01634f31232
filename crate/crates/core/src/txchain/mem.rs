use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::FixedWord16;
use crate::{Error, Result};

/// ROM initialization lines: one word per line, four lowercase hex digits of
/// the two's-complement value.
pub fn format_mem_lines(words: &[FixedWord16]) -> Vec<String> {
    words
        .iter()
        .map(|w| format!("{:04x}", w.0 as u16))
        .collect()
}

/// Parses [`format_mem_lines`] output back to words. Blank lines are
/// skipped.
pub fn parse_mem_lines<'a, I>(lines: I) -> Result<Vec<FixedWord16>>
where
    I: IntoIterator<Item = &'a str>,
{
    lines
        .into_iter()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            if l.len() != 4 {
                return Err(Error::InvalidParameter {
                    name: "mem line",
                    reason: "expected four hex digits",
                });
            }
            u16::from_str_radix(l, 16)
                .map(|v| FixedWord16(v as i16))
                .map_err(|_| Error::InvalidParameter {
                    name: "mem line",
                    reason: "not hex",
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hex_words() {
        let lines = format_mem_lines(&[FixedWord16(0), FixedWord16(32767), FixedWord16(-32768)]);
        assert_eq!(lines, vec!["0000", "7fff", "8000"]);
        assert_eq!(format_mem_lines(&[FixedWord16(-1)]), vec!["ffff"]);
        assert!(format_mem_lines(&[]).is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_mem_lines(["12"]).is_err());
        assert!(parse_mem_lines(["zzzz"]).is_err());
        assert_eq!(
            parse_mem_lines(["", "8000", " "]).unwrap(),
            vec![FixedWord16(i16::MIN)]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn parse_back(words in proptest::collection::vec(any::<i16>(), 0..128)) {
                let words: Vec<FixedWord16> = words.into_iter().map(FixedWord16).collect();
                let lines = format_mem_lines(&words);
                prop_assert_eq!(lines.len(), words.len());
                let back = parse_mem_lines(lines.iter().map(String::as_str)).unwrap();
                prop_assert_eq!(back, words);
            }
        }
    }
}
