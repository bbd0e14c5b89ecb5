use std::collections::BTreeMap;
use std::path::Path;

use crate::bundled::KEYBOARD as TURKISH_Q;
use crate::error::{Error, Result};

/// The 29 letters of the Turkish alphabet, in alphabetical order.
pub const TURKISH_LETTERS: [char; 29] = [
    'a', 'b', 'c', 'ç', 'd', 'e', 'f', 'g', 'ğ', 'h', 'ı', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'ö', 'p', 'r', 's', 'ş',
    't', 'u', 'ü', 'v', 'y', 'z',
];

/// Letters that exist on the keyboard but not in Turkish words.
pub const FOREIGN_LETTERS: [char; 3] = ['q', 'w', 'x'];

pub fn is_turkish_letter(c: char) -> bool {
    TURKISH_LETTERS.contains(&c)
}

/// Per-letter sets of physically adjacent keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyboardMatrix {
    neighbors: BTreeMap<char, Vec<char>>,
}

impl KeyboardMatrix {
    /// The bundled Turkish Q layout.
    pub fn turkish_q() -> Self {
        KeyboardMatrix::parse(TURKISH_Q, "builtin keyboard").expect("bundled matrix is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        KeyboardMatrix::parse(&text, &path.display().to_string())
    }

    /// One row per letter: the key, then its neighbors, space separated.
    /// Blank lines and `#` comment lines are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut neighbors: BTreeMap<char, Vec<char>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace().map(|f| single_char(f, origin, line_no));
            let key = fields.next().expect("non-empty line")?;
            if !is_turkish_letter(key) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("key {key:?} is not a Turkish letter"),
                ));
            }
            if neighbors.contains_key(&key) {
                return Err(Error::parse(origin, line_no, format!("duplicate row for {key:?}")));
            }
            let mut row = Vec::new();
            for n in fields {
                let n = n?;
                if n == key {
                    return Err(Error::parse(
                        origin,
                        line_no,
                        format!("{key:?} lists itself as a neighbor"),
                    ));
                }
                if !is_turkish_letter(n) && !FOREIGN_LETTERS.contains(&n) {
                    return Err(Error::parse(
                        origin,
                        line_no,
                        format!("neighbor {n:?} is not a keyboard letter"),
                    ));
                }
                if row.contains(&n) {
                    return Err(Error::parse(origin, line_no, format!("neighbor {n:?} repeated")));
                }
                row.push(n);
            }
            neighbors.insert(key, row);
        }
        if let Some(missing) = TURKISH_LETTERS.iter().find(|c| !neighbors.contains_key(c)) {
            return Err(Error::Data(format!("{origin}: no row for letter {missing:?}")));
        }
        Ok(KeyboardMatrix { neighbors })
    }

    /// Neighbors of `key` in file order; empty for letters without a row.
    pub fn neighbors(&self, key: char) -> &[char] {
        self.neighbors.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, key: char) -> bool {
        self.neighbors.contains_key(&key)
    }

    /// True when `typed` sits next to `intended` on the keyboard.
    pub fn is_adjacent(&self, typed: char, intended: char) -> bool {
        self.neighbors(intended).contains(&typed)
    }

    pub fn rows(&self) -> impl Iterator<Item = (char, &[char])> {
        self.neighbors.iter().map(|(k, v)| (*k, v.as_slice()))
    }
}

fn single_char(field: &str, origin: &str, line: usize) -> Result<char> {
    let mut chars = field.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::parse(
            origin,
            line,
            format!("field {field:?} is not a single letter"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_rows() {
        let kb = KeyboardMatrix::turkish_q();
        assert_eq!(kb.neighbors('a'), ['z', 's', 'w', 'q']);
        assert_eq!(kb.neighbors('e'), ['w', 's', 'd', 'r']);
        assert_eq!(kb.rows().count(), 29);
        assert!(kb.is_adjacent('w', 'e'));
        assert!(!kb.is_adjacent('e', 'w'));
    }

    #[test]
    fn missing_row_is_named() {
        let text: String = TURKISH_Q
            .lines()
            .filter(|l| !l.starts_with('z'))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = KeyboardMatrix::parse(&text, "mem").unwrap_err();
        assert!(err.to_string().contains("'z'"), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_self_neighbors() {
        let dup = format!("{TURKISH_Q}a s\n");
        assert!(matches!(
            KeyboardMatrix::parse(&dup, "mem"),
            Err(Error::Parse { row: 30, .. })
        ));
        let selfish = TURKISH_Q.replacen("a z s w q", "a a s", 1);
        assert!(KeyboardMatrix::parse(&selfish, "mem").is_err());
        let wide = TURKISH_Q.replacen("a z s w q", "a zs", 1);
        assert!(KeyboardMatrix::parse(&wide, "mem").is_err());
        let foreign_key = format!("{TURKISH_Q}q w a\n");
        assert!(KeyboardMatrix::parse(&foreign_key, "mem").is_err());
    }
}
