//! Plain-text vector format: a `V dim` header line, then `word v1 … vdim` per word.
//! Only input vectors are stored; output vectors load as zeros and counts as 1.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::sgns::EmbeddingMatrix;
use super::vocab::Vocab;
use crate::error::{Error, Result};

pub fn write_text<W: Write>(vocab: &Vocab, matrix: &EmbeddingMatrix, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", vocab.len(), matrix.dim())?;
    for (i, word) in vocab.words().iter().enumerate() {
        write!(w, "{word}")?;
        for v in matrix.input_row(i) {
            // `{}` on f64 prints the shortest string that parses back exactly.
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn save_text(vocab: &Vocab, matrix: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_text(vocab, matrix, file).map_err(|e| Error::io(path, e))
}

pub fn read_text<R: Read>(reader: R, origin: &str) -> Result<(Vocab, EmbeddingMatrix)> {
    let mut lines = BufReader::new(reader).lines();
    let mut next_line = |row: usize| -> Result<Option<String>> {
        lines
            .next()
            .transpose()
            .map_err(|e| Error::parse(origin, row, format!("read failed: {e}")))
    };
    let header = next_line(1)?.ok_or_else(|| Error::parse(origin, 1, "missing `V dim` header"))?;
    let (v, dim) = header
        .split_once(' ')
        .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
        .ok_or_else(|| Error::parse(origin, 1, format!("malformed header {header:?}")))?;
    if v == 0 || dim == 0 {
        return Err(Error::parse(origin, 1, "V and dim must be positive"));
    }
    let mut words = Vec::with_capacity(v);
    let mut input = Vec::with_capacity(v.saturating_mul(dim).min(1 << 24));
    for row in 2..v + 2 {
        let line = next_line(row)?.ok_or_else(|| Error::parse(origin, row, format!("expected {v} vectors")))?;
        let mut fields = line.split(' ');
        let word = fields.next().unwrap_or_default().to_owned();
        let before = input.len();
        for f in fields {
            let x: f64 = f
                .parse()
                .map_err(|_| Error::parse(origin, row, format!("invalid number {f:?}")))?;
            input.push(x);
        }
        if input.len() - before != dim {
            return Err(Error::parse(origin, row, format!("expected {dim} components")));
        }
        words.push((word, 1));
    }
    if next_line(v + 2)?.is_some_and(|l| !l.trim().is_empty()) {
        return Err(Error::parse(origin, v + 2, "trailing data after the declared vectors"));
    }
    let vocab = Vocab::from_counts(words, 1)?;
    let output = vec![0.0; input.len()];
    Ok((vocab, EmbeddingMatrix::from_parts(dim, input, output)?))
}

pub fn load_text(path: impl AsRef<Path>) -> Result<(Vocab, EmbeddingMatrix)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_text(file, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_vocab, train_sgns, SgnsParams};
    use crate::textnorm::Token;

    #[test]
    fn round_trip_is_exact() {
        let sentences: Vec<Vec<Token>> = ["yemek çok güzel", "servis çok kötü", "yemek geç geldi"]
            .iter()
            .map(|s| s.split(' ').map(|w| Token::new(w).unwrap()).collect())
            .collect();
        let vocab = build_vocab(&sentences, 1).unwrap();
        let params = SgnsParams {
            dim: 7,
            epochs: 3,
            ..SgnsParams::default()
        };
        let m = train_sgns(&sentences, &vocab, &params).unwrap();
        let mut buf = Vec::new();
        write_text(&vocab, &m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("{} 7\n", vocab.len())));
        let (v2, m2) = read_text(buf.as_slice(), "mem").unwrap();
        assert_eq!(v2.words(), vocab.words());
        for i in 0..vocab.len() {
            assert_eq!(m2.input_row(i), m.input_row(i));
        }
    }

    #[test]
    fn malformed_files() {
        assert!(read_text("".as_bytes(), "mem").is_err());
        assert!(read_text("2 2\na 1 2\n".as_bytes(), "mem").is_err());
        assert!(read_text("1 2\na 1\n".as_bytes(), "mem").is_err());
        assert!(read_text("1 2\na 1 x\n".as_bytes(), "mem").is_err());
        assert!(read_text("1 2\na 1 2\nb 3 4\n".as_bytes(), "mem").is_err());
        assert!(read_text("1 1\na NaN\n".as_bytes(), "mem").is_err());
        let err = read_text("2 1\na 1\na 2\n".as_bytes(), "mem").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }
}
