//! Line-oriented text formats.
//!
//! Matrix: `matrix <p> <rows> <cols>` followed by one line per row of
//! base-10 residues separated by single spaces. Polynomial: `poly <p> <deg>`
//! followed by the coefficients, lowest degree first, on one line.

use super::{Fp, FpMatrix, FpPoly, GfError, Result};

pub fn write_matrix(m: &FpMatrix) -> String {
    let mut s = format!("matrix {} {} {}\n", m.field().p(), m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row_slice(i).iter().map(|x| x.to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

/// Parses one matrix from an iterator of lines; consumes exactly the
/// header and `rows` body lines.
pub fn read_matrix_lines<'a, I>(lines: &mut I) -> Result<FpMatrix>
where
    I: Iterator<Item = &'a str>,
{
    let header = lines
        .next()
        .ok_or_else(|| GfError::Parse("missing matrix header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "matrix" {
        return Err(GfError::Parse(format!("bad matrix header `{header}`")));
    }
    let p: u64 = parse_num(parts[1])?;
    let rows: usize = parse_num(parts[2])?;
    let cols: usize = parse_num(parts[3])?;
    let field = Fp::new(p)?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| GfError::Parse(format!("matrix truncated at row {r}")))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_num::<u32>(tok)?);
        }
        if data.len() - before != cols {
            return Err(GfError::Parse(format!(
                "row {r} has {} entries, expected {cols}",
                data.len() - before
            )));
        }
    }
    FpMatrix::from_residues(field, rows, cols, data)
}

pub fn parse_matrix(text: &str) -> Result<FpMatrix> {
    let mut lines = text.lines();
    let m = read_matrix_lines(&mut lines)?;
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(GfError::Parse("trailing content after matrix".into()));
    }
    Ok(m)
}

pub fn write_poly(f: &FpPoly) -> String {
    let deg = f.degree().map(|d| d as i64).unwrap_or(-1);
    let coeffs: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
    format!("poly {} {}\n{}\n", f.field().p(), deg, coeffs.join(" "))
}

pub fn parse_poly(text: &str) -> Result<FpPoly> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| GfError::Parse("missing poly header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "poly" {
        return Err(GfError::Parse(format!("bad poly header `{header}`")));
    }
    let field = Fp::new(parse_num(parts[1])?)?;
    let deg: i64 = parse_num(parts[2])?;
    let body = lines.next().unwrap_or("");
    let coeffs = body
        .split_whitespace()
        .map(parse_num::<u32>)
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() as i64 != deg + 1 {
        return Err(GfError::Parse(format!(
            "degree {deg} but {} coefficients",
            coeffs.len()
        )));
    }
    if coeffs.iter().any(|&c| c >= field.p()) {
        return Err(GfError::Parse("coefficient out of range".into()));
    }
    if coeffs.last() == Some(&0) {
        return Err(GfError::Parse("leading coefficient is zero".into()));
    }
    Ok(FpPoly::from_residues(field, coeffs))
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| GfError::Parse(format!("invalid number `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_text_is_bit_exact() {
        let f = Fp::new(7).unwrap();
        let m = FpMatrix::from_i64(f, 2, 3, &[1, 2, 3, 4, 5, 6]).unwrap();
        let s = write_matrix(&m);
        assert_eq!(s, "matrix 7 2 3\n1 2 3\n4 5 6\n");
        assert_eq!(parse_matrix(&s).unwrap(), m);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(parse_matrix("matrix 6 1 1\n0\n").is_err());
        assert!(parse_matrix("matrix 7 1 2\n0\n").is_err());
        assert!(parse_matrix("matrix 7 1 1\n9\n").is_err());
        assert!(parse_matrix("matrix 7 2 1\n0\n").is_err());
    }

    #[test]
    fn poly_text() {
        let f = Fp::new(11).unwrap();
        let p = FpPoly::from_i64(f, &[3, 0, 1]);
        let s = write_poly(&p);
        assert_eq!(s, "poly 11 2\n3 0 1\n");
        assert_eq!(parse_poly(&s).unwrap(), p);
        assert_eq!(parse_poly("poly 11 -1\n\n").unwrap(), FpPoly::zero(f));
        assert!(parse_poly("poly 11 1\n3 0\n").is_err());
    }
}
