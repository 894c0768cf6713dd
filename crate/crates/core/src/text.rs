//! Small text helpers shared by the scorers, the span recovery and the DS filters.
//!
//! All offsets handled here are Unicode scalar (char) offsets, never byte offsets,
//! so they agree with what the Python side of the wire protocol sees.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// A token together with its char span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Splits on whitespace and punctuation, keeping alphanumeric runs only.
/// Tokens keep their original case; use [`words`] for the lower-cased form.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in text.chars().enumerate() {
        if c.is_alphanumeric() {
            if cur.is_empty() {
                start = i;
            }
            cur.push(c);
        } else if !cur.is_empty() {
            out.push(Token {
                text: std::mem::take(&mut cur),
                start,
                end: i,
            });
        }
    }
    if !cur.is_empty() {
        let end = start + cur.chars().count();
        out.push(Token {
            text: cur,
            start,
            end,
        });
    }
    out
}

/// Lower-cased word sequence of `text`.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| t.text.to_lowercase())
        .collect()
}

/// Case- and diacritic-folded form with runs of non-alphanumerics collapsed to one space.
pub fn fold(text: &str) -> String {
    let stripped: String = text
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase();
    let mut out = String::with_capacity(stripped.len());
    let mut pending_space = false;
    for c in stripped.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Bidirectional containment over folded strings. Empty strings never match.
pub fn loosely_matches(a: &str, b: &str) -> bool {
    let (a, b) = (fold(a), fold(b));
    if a.is_empty() || b.is_empty() {
        return false;
    }
    a.contains(&b) || b.contains(&a)
}

/// Splits an identifier like `deathPlace`, `placeOfBirth` or `founding_year`
/// into lower-case words.
pub fn split_identifier(ident: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = ident.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let boundary = !cur.is_empty()
            && ((c.is_uppercase()
                && (chars[i - 1].is_lowercase()
                    || chars.get(i + 1).is_some_and(|n| n.is_lowercase())
                        && chars[i - 1].is_uppercase()))
                || (c.is_ascii_digit() != chars[i - 1].is_ascii_digit()));
        if boundary {
            out.push(std::mem::take(&mut cur));
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub(crate) fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_tracks_char_offsets() {
        let toks = tokenize("Who is Nikola Tesla?");
        let spans: Vec<_> = toks.iter().map(|t| (t.text.as_str(), t.start, t.end)).collect();
        assert_eq!(
            spans,
            vec![("Who", 0, 3), ("is", 4, 6), ("Nikola", 7, 13), ("Tesla", 14, 19)]
        );
        let toks = tokenize("Día en La Habana");
        assert_eq!((toks[1].start, toks[1].end), (4, 6));
    }

    #[test]
    fn fold_strips_case_and_diacritics() {
        assert_eq!(fold("  Días en  La-Habana!"), "dias en la habana");
        assert!(loosely_matches("Duka Tesla (mother)", "duka tesla"));
        assert!(!loosely_matches("", "x"));
        assert!(!loosely_matches("Nikola Tesla", "Duka Tesla"));
    }

    #[test]
    fn identifiers_split_on_case_and_separators() {
        assert_eq!(split_identifier("deathPlace"), vec!["death", "place"]);
        assert_eq!(split_identifier("placeOfBirth"), vec!["place", "of", "birth"]);
        assert_eq!(split_identifier("founding_year"), vec!["founding", "year"]);
        assert_eq!(split_identifier("ISBNNumber"), vec!["isbn", "number"]);
        assert_eq!(split_identifier("spouse"), vec!["spouse"]);
    }
}
