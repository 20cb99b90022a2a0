//! Plain-text graph files.
//!
//! ```text
//! # comment
//! 6 2 undirected
//! D 1
//! D 2
//! 1 3
//! ```
//!
//! The header is `n k_hint directed|undirected`; every other non-empty line
//! is an edge `u v` where `D` names the dealer.

use super::{Network, DEALER};
use crate::error::{Error, Result};

fn parse_node(tok: &str, n: usize, line: usize) -> Result<usize> {
    if tok == "D" || tok == "d" {
        return Ok(DEALER);
    }
    let id: usize = tok.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("bad node token `{tok}`"),
    })?;
    if id == 0 || id > n {
        return Err(Error::Parse {
            line,
            reason: format!("node id {id} outside 1..={n}"),
        });
    }
    Ok(id)
}

/// Parses a graph file. Returns the network and the header's `k_hint`.
pub fn parse_graph(text: &str) -> Result<(Network, usize)> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut net: Option<Network> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "header must be `n k_hint directed|undirected`".into(),
                    });
                }
                let n: usize = toks[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: "bad participant count".into(),
                })?;
                let k_hint: usize = toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: "bad k_hint".into(),
                })?;
                let directed = match toks[2] {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            reason: format!("unknown orientation `{other}`"),
                        })
                    }
                };
                header = Some((n, k_hint, directed));
                net = Some(Network::new(n, directed));
            }
            Some((n, _, _)) => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "edge lines hold exactly two node tokens".into(),
                    });
                }
                let u = parse_node(toks[0], n, line_no)?;
                let v = parse_node(toks[1], n, line_no)?;
                net.as_mut()
                    .unwrap()
                    .add_edge(u, v)
                    .map_err(|e| Error::Parse {
                        line: line_no,
                        reason: e.to_string(),
                    })?;
            }
        }
    }
    match (net, header) {
        (Some(net), Some((_, k_hint, _))) => Ok((net, k_hint)),
        _ => Err(Error::Parse {
            line: 0,
            reason: "missing header".into(),
        }),
    }
}

fn token(v: usize) -> String {
    if v == DEALER {
        "D".to_string()
    } else {
        v.to_string()
    }
}

/// Canonical text form: header, then edges in ascending order.
pub fn write_graph(net: &Network, k_hint: usize) -> String {
    let mut out = format!(
        "{} {} {}\n",
        net.n(),
        k_hint,
        if net.is_directed() { "directed" } else { "undirected" }
    );
    for (u, v) in net.edges() {
        out.push_str(&token(u));
        out.push(' ');
        out.push_str(&token(v));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fixtures;

    #[test]
    fn toy_round_trips_through_text() {
        let toy = fixtures::toy();
        let text = write_graph(&toy, 2);
        let (back, k) = parse_graph(&text).unwrap();
        assert_eq!(k, 2);
        assert_eq!(back, toy);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let (net, _) = parse_graph("# hi\n\n2 2 directed # trailing\nD 1\n1 2 # edge\n").unwrap();
        assert!(net.has_arc(0, 1) && net.has_arc(1, 2) && !net.has_arc(2, 1));
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(parse_graph("2 2 undirected\nD 1\n1 D\n").is_err());
        assert!(parse_graph("2 2 undirected\nD 3\n").is_err());
        assert!(parse_graph("2 2 undirected\n0 1\n").is_err());
        assert!(parse_graph("2 2 sideways\n").is_err());
        assert!(parse_graph("").is_err());
    }
}
