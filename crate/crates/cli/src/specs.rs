//! Text specs turning command-line strings into graphs and node systems.
//!
//! Graph specs name a built-in family (`demo4`/`fig3`, `path5`, `cycle6`,
//! `star4`, `complete3`, `balanced:n,cycles,seed`) or give a path to an
//! edge-list file. Node specs are `sprott(mu=0.55)`, `sprott(mu=0, g=sin)`,
//! `cubic`, or `linear([[a,b],[c,d]])`.

use std::path::Path;

use netstab_core::dynamics::{
    cubic_scalar, linear_node, sprott_circulant, NodeSystem, SprottNonlinearity,
};
use netstab_core::graph::Graph;
use netstab_core::{Error, RealMatrix, Result};

/// Resolves a graph spec string. Named families win over files, so a file
/// literally called `cycle5` needs a `./` prefix.
pub fn parse_graph_spec(spec: &str) -> Result<Graph> {
    let s = spec.trim();
    if s.is_empty() {
        return Err(Error::invalid("empty graph spec"));
    }
    if s == "demo4" || s == "fig3" {
        return Ok(Graph::demo4());
    }
    if let Some(rest) = s.strip_prefix("balanced:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "balanced spec needs n,cycles,seed; got {rest:?}"
            )));
        }
        let n: usize = parse_field(parts[0], "node count")?;
        let cycles: usize = parse_field(parts[1], "cycle count")?;
        let seed: u64 = parse_field(parts[2], "seed")?;
        return Graph::random_balanced_digraph(n, cycles, seed);
    }
    type Family = fn(usize) -> Result<Graph>;
    let families: [(&str, Family); 4] = [
        ("path", Graph::path),
        ("cycle", Graph::cycle),
        ("star", Graph::star),
        ("complete", Graph::complete),
    ];
    for (prefix, ctor) in families {
        if let Some(num) = s.strip_prefix(prefix) {
            if let Ok(n) = num.parse::<usize>() {
                return ctor(n);
            }
        }
    }
    if Path::new(s).is_file() {
        let text = std::fs::read_to_string(s)
            .map_err(|e| Error::invalid(format!("cannot read graph file {s:?}: {e}")))?;
        return Graph::parse(&text);
    }
    Err(Error::invalid(format!(
        "unknown graph spec {s:?}; expected a family like path5, cycle6, star4, \
         complete3, demo4, balanced:n,cycles,seed, or a path to an edge-list file"
    )))
}

fn parse_field<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse::<T>()
        .map_err(|_| Error::invalid(format!("bad {what} {text:?}")))
}

/// Resolves a node spec string into a node system.
pub fn parse_node_spec(spec: &str) -> Result<NodeSystem> {
    let s = spec.trim();
    if s == "cubic" {
        return Ok(cubic_scalar());
    }
    if let Some(args) = call_args(s, "sprott")? {
        let mut mu: Option<f64> = None;
        let mut g = SprottNonlinearity::Tanh;
        for item in args.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {item:?}")))?;
            match key.trim() {
                "mu" => mu = Some(parse_field(value, "mu")?),
                "g" => {
                    g = match value.trim() {
                        "tanh" => SprottNonlinearity::Tanh,
                        "sin" => SprottNonlinearity::Sin,
                        other => {
                            return Err(Error::invalid(format!(
                                "unknown nonlinearity {other:?}; expected tanh or sin"
                            )))
                        }
                    }
                }
                other => return Err(Error::invalid(format!("unknown sprott key {other:?}"))),
            }
        }
        let mu = mu.ok_or_else(|| Error::invalid("sprott spec needs mu=<value>"))?;
        if !mu.is_finite() {
            return Err(Error::invalid("mu must be finite"));
        }
        return Ok(sprott_circulant(mu, g));
    }
    if let Some(args) = call_args(s, "linear")? {
        let rows: Vec<Vec<f64>> = serde_json::from_str(args)
            .map_err(|e| Error::invalid(format!("bad linear matrix: {e}")))?;
        let m = RealMatrix::from_rows(&rows)?;
        return linear_node(m);
    }
    Err(Error::invalid(format!(
        "unknown node spec {s:?}; expected cubic, sprott(mu=..., g=tanh|sin), \
         or linear([[...]])"
    )))
}

/// Extracts the argument text of `name(...)`, or Ok(None) when the spec does
/// not start with `name(`.
fn call_args<'a>(spec: &'a str, name: &str) -> Result<Option<&'a str>> {
    let Some(rest) = spec.strip_prefix(name) else {
        return Ok(None);
    };
    let rest = rest.trim_start();
    let Some(inner) = rest.strip_prefix('(') else {
        return Ok(None);
    };
    let Some(inner) = inner.strip_suffix(')') else {
        return Err(Error::invalid(format!("unbalanced parentheses in {spec:?}")));
    };
    Ok(Some(inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_families_resolve() {
        assert_eq!(parse_graph_spec("fig3").unwrap(), Graph::demo4());
        assert_eq!(parse_graph_spec("demo4").unwrap(), Graph::demo4());
        let p = parse_graph_spec("path5").unwrap();
        assert_eq!(p.n(), 5);
        assert_eq!(p.edge_count(), 4);
        let c = parse_graph_spec("cycle6").unwrap();
        assert_eq!(c.n(), 6);
        assert_eq!(c.edge_count(), 6);
        let s = parse_graph_spec("star4").unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.degree_profile().0, vec![3, 1, 1, 1]);
        let k = parse_graph_spec("complete3").unwrap();
        assert_eq!(k.edge_count(), 3);
    }

    #[test]
    fn balanced_spec_is_seed_deterministic() {
        let a = parse_graph_spec("balanced:4,3,7").unwrap();
        let b = parse_graph_spec("balanced:4,3,7").unwrap();
        assert_eq!(a, b);
        assert!(a.is_directed());
        let (kin, kout) = a.degree_profile();
        assert_eq!(kin, kout);
    }

    #[test]
    fn graph_file_round_trips() {
        let dir = std::env::temp_dir().join("netstab-spec-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.txt");
        std::fs::write(&path, Graph::demo4().serialize()).unwrap();
        let g = parse_graph_spec(path.to_str().unwrap()).unwrap();
        assert_eq!(g, Graph::demo4());
    }

    #[test]
    fn bad_graph_specs_are_rejected() {
        assert!(parse_graph_spec("").is_err());
        assert!(parse_graph_spec("blob7").is_err());
        assert!(parse_graph_spec("balanced:4,3").is_err());
        assert!(parse_graph_spec("path").is_err());
        // A family with an invalid size is a constructor error, not a fallthrough.
        assert!(parse_graph_spec("cycle2").is_err());
    }

    #[test]
    fn node_specs_resolve() {
        let n = parse_node_spec("sprott(mu=0.55)").unwrap();
        assert_eq!(n.dim(), 3);
        assert_eq!(n.name(), "sprott(tanh)");
        assert_eq!(n.params(), &[0.55]);
        let n = parse_node_spec("sprott(mu=0, g=sin)").unwrap();
        assert_eq!(n.name(), "sprott(sin)");
        let n = parse_node_spec("cubic").unwrap();
        assert_eq!(n.dim(), 1);
        let n = parse_node_spec("linear([[0,1],[-1,0]])").unwrap();
        assert_eq!(n.dim(), 2);
        let j = n.jacobian(&[0.0, 0.0]);
        assert_eq!(j[(0, 1)], 1.0);
        assert_eq!(j[(1, 0)], -1.0);
    }

    #[test]
    fn bad_node_specs_are_rejected() {
        assert!(parse_node_spec("sprott()").is_err());
        assert!(parse_node_spec("sprott(mu=0.5, g=step)").is_err());
        assert!(parse_node_spec("sprott(mu=0.5").is_err());
        assert!(parse_node_spec("sprott(nu=0.5)").is_err());
        assert!(parse_node_spec("linear([[0,1]])").is_err());
        assert!(parse_node_spec("linear(banana)").is_err());
        assert!(parse_node_spec("pendulum").is_err());
    }
}
