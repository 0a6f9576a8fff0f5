//! Text format: a header `vars=<2|3> deg=<d>` followed by one line
//! `e0 e1 [e2] = <scalar>` per nonzero monomial. Blank lines and lines
//! starting with `#` are ignored.

use super::{monomial_index, HomogeneousForm, Poly};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn column_of(line: &str, token: &str) -> usize {
    let base = line.as_ptr() as usize;
    token.as_ptr() as usize - base + 1
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut nvars = None;
    let mut deg = None;
    for tok in line.split_whitespace() {
        let col = column_of(line, tok);
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, col, format!("expected key=value, got `{tok}`")))?;
        let n: usize = v
            .parse()
            .map_err(|_| Error::parse(lineno, col + k.len() + 1, format!("bad number `{v}`")))?;
        match k {
            "vars" if nvars.is_none() => nvars = Some(n),
            "deg" if deg.is_none() => deg = Some(n),
            _ => return Err(Error::parse(lineno, col, format!("unexpected header key `{k}`"))),
        }
    }
    let nvars = nvars.ok_or_else(|| Error::parse(lineno, 1, "missing vars="))?;
    let deg = deg.ok_or_else(|| Error::parse(lineno, 1, "missing deg="))?;
    if nvars != 2 && nvars != 3 {
        return Err(Error::parse(lineno, 1, format!("vars must be 2 or 3, got {nvars}")));
    }
    if deg > 64 {
        return Err(Error::parse(lineno, 1, format!("degree {deg} too large")));
    }
    Ok((nvars, deg))
}

fn is_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_body<'a>(
    nvars: usize,
    deg: usize,
    lines: impl Iterator<Item = (usize, &'a str)>,
    prec: usize,
) -> Result<HomogeneousForm> {
    let mut f: HomogeneousForm = Poly::zero(nvars, deg);
    let mut seen = vec![false; f.coeffs().len()];
    for (lineno, line) in lines {
        if is_blank(line) {
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, 1, "expected `exponents = scalar`"))?;
        let mut e = [0usize; 3];
        let toks: Vec<&str> = lhs.split_whitespace().collect();
        if toks.len() != nvars {
            return Err(Error::parse(
                lineno,
                1,
                format!("expected {nvars} exponents, got {}", toks.len()),
            ));
        }
        for (i, t) in toks.iter().enumerate() {
            e[i] = t
                .parse()
                .map_err(|_| Error::parse(lineno, column_of(line, t), format!("bad exponent `{t}`")))?;
        }
        if e.iter().sum::<usize>() != deg {
            return Err(Error::parse(
                lineno,
                column_of(line, toks[0]),
                format!("exponents sum to {}, expected {deg}", e.iter().sum::<usize>()),
            ));
        }
        let rcol = column_of(line, rhs);
        let c = Scalar::parse(rhs, prec).map_err(|err| match err {
            Error::Parse { message, .. } => Error::parse(lineno, rcol, message),
            other => other,
        })?;
        let idx = monomial_index(nvars, deg, &e);
        if seen[idx] {
            return Err(Error::parse(lineno, 1, "duplicate monomial"));
        }
        seen[idx] = true;
        f.set_coeff(&e, c);
    }
    Ok(f)
}

/// Parse one form. Complex coefficients are read at `prec` bits.
pub fn parse_form(text: &str, prec: usize) -> Result<HomogeneousForm> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).skip_while(|(_, l)| is_blank(l));
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let (nvars, deg) = parse_header(header, hl)?;
    let rest: Vec<(usize, &str)> = lines.collect();
    if let Some((ln, _)) = rest.iter().find(|(_, l)| l.trim_start().starts_with("vars=")) {
        return Err(Error::parse(*ln, 1, "second header in single-form input"));
    }
    parse_body(nvars, deg, rest.into_iter(), prec)
}

/// Parse a sequence of forms, each starting with its own header line.
pub fn parse_forms(text: &str, prec: usize) -> Result<Vec<HomogeneousForm>> {
    let mut out = Vec::new();
    let mut current: Option<(usize, usize, Vec<(usize, &str)>)> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim_start().starts_with("vars=") {
            if let Some((n, d, body)) = current.take() {
                out.push(parse_body(n, d, body.into_iter(), prec)?);
            }
            let (n, d) = parse_header(line, lineno)?;
            current = Some((n, d, Vec::new()));
        } else if let Some((_, _, body)) = current.as_mut() {
            body.push((lineno, line));
        } else if !is_blank(line) {
            return Err(Error::parse(lineno, 1, "content before the first header"));
        }
    }
    if let Some((n, d, body)) = current {
        out.push(parse_body(n, d, body.into_iter(), prec)?);
    }
    Ok(out)
}
