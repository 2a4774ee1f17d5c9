//! ASCII OFF meshes. Polygonal faces are fan-triangulated; `#` starts a
//! comment.

use crate::error::{Error, Result};
use crate::rigid::Vec3;
use crate::synthesis::SurfaceModel;

struct Tokens<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| {
                    (
                        i + 1,
                        l.split('#')
                            .next()
                            .unwrap_or("")
                            .split_whitespace()
                            .collect::<Vec<_>>(),
                    )
                })
                .filter(|(_, t)| !t.is_empty()),
        );
        Self {
            lines: it.peekable(),
        }
    }

    fn line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.lines.next().ok_or_else(|| {
            Error::InvalidInput(format!("OFF: unexpected end of file reading {what}"))
        })
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::InvalidInput(format!("OFF line {line}: cannot parse `{tok}`")))
}

/// Parses an OFF mesh. Faces must be wound counter-clockwise seen from
/// outside; the result is validated as a closed, outward-oriented mesh.
pub fn parse_off(text: &str) -> Result<SurfaceModel> {
    let mut toks = Tokens::new(text);
    let (line, mut head) = toks.line("header")?;
    if head[0] == "OFF" {
        head.remove(0);
    } else if let Some(rest) = head[0].strip_prefix("OFF") {
        head[0] = rest;
    } else {
        return Err(Error::InvalidInput(format!(
            "OFF line {line}: missing OFF header"
        )));
    }
    let (line, counts) = if head.is_empty() {
        toks.line("counts")?
    } else {
        (line, head)
    };
    if counts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "OFF line {line}: expected vertex and face counts"
        )));
    }
    let nv: usize = num(counts[0], line)?;
    let nf: usize = num(counts[1], line)?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, t) = toks.line("vertices")?;
        if t.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "OFF line {line}: vertex needs 3 coordinates"
            )));
        }
        vertices.push(Vec3::new(
            num(t[0], line)?,
            num(t[1], line)?,
            num(t[2], line)?,
        ));
    }
    let mut triangles = Vec::new();
    for _ in 0..nf {
        let (line, t) = toks.line("faces")?;
        let k: usize = num(t[0], line)?;
        if k < 3 || t.len() < k + 1 {
            return Err(Error::InvalidInput(format!(
                "OFF line {line}: malformed face"
            )));
        }
        let idx = t[1..=k]
            .iter()
            .map(|s| num::<usize>(s, line))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = idx.iter().find(|&&i| i >= nv) {
            return Err(Error::InvalidInput(format!(
                "OFF line {line}: vertex index {bad} out of range"
            )));
        }
        for j in 1..k - 1 {
            triangles.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    let mesh = SurfaceModel::Mesh {
        vertices,
        triangles,
    };
    mesh.validate()?;
    Ok(mesh)
}
