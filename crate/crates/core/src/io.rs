//! Graph-spec file format.
//!
//! ```json
//! {
//!   "edges": [
//!     { "length": 3.14159, "potential": { "type": "polynomial", "coeffs": [0, 0, 1] } }
//!   ],
//!   "coupling": { "type": "unitary", "matrix_real": [[1, 0], [0, 1]] }
//! }
//! ```
//!
//! Potentials: `zero`, `constant` (`value`), `polynomial` (`coeffs`, ascending
//! powers) and `table` (`xs`, `qs`, linear interpolation). Couplings:
//! `hermitian` and `unitary` carry `matrix_real` / `matrix_imag` (row-major,
//! either nested rows or one flat array; `matrix_imag` defaults to zero), and
//! `vertices` carries a list of `{ "endpoints": [...], "matrix_real", "matrix_imag" }`
//! with 1-based endpoint numbers: `2j - 1` is the start and `2j` the end of edge `j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    validate_graph, CMatrix, CouplingSpec, Diagnostic, Edge, MetricGraph, Potential, VertexCoupling,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("graph spec line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("graph spec field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("graph spec is inconsistent: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub edges: Vec<EdgeSpec>,
    pub coupling: CouplingFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub length: f64,
    #[serde(default = "zero_potential")]
    pub potential: PotentialSpec,
}

fn zero_potential() -> PotentialSpec {
    PotentialSpec::Zero
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant { value: f64 },
    Polynomial { coeffs: Vec<f64> },
    Table { xs: Vec<f64>, qs: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexFile {
    pub endpoints: Vec<usize>,
    pub matrix_real: MatrixData,
    #[serde(default)]
    pub matrix_imag: Option<MatrixData>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CouplingFile {
    Hermitian {
        matrix_real: MatrixData,
        #[serde(default)]
        matrix_imag: Option<MatrixData>,
    },
    Unitary {
        matrix_real: MatrixData,
        #[serde(default)]
        matrix_imag: Option<MatrixData>,
    },
    Vertices {
        vertices: Vec<VertexFile>,
    },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn rows_of(data: &MatrixData, field: &str) -> Result<(usize, Vec<f64>), SpecError> {
    match data {
        MatrixData::Nested(rows) => {
            let n = rows.len();
            if let Some(bad) = rows.iter().position(|r| r.len() != n) {
                return Err(field_err(
                    format!("{field}[{bad}]"),
                    format!("expected {n} columns"),
                ));
            }
            Ok((n, rows.iter().flatten().copied().collect()))
        }
        MatrixData::Flat(values) => {
            let n = (values.len() as f64).sqrt().round() as usize;
            if n * n != values.len() {
                return Err(field_err(
                    field,
                    format!("{} entries is not a square matrix", values.len()),
                ));
            }
            Ok((n, values.clone()))
        }
    }
}

fn complex_matrix(
    re: &MatrixData,
    im: Option<&MatrixData>,
    field: &str,
) -> Result<CMatrix, SpecError> {
    let (n, re_vals) = rows_of(re, &format!("{field}.matrix_real"))?;
    let im_vals = match im {
        Some(m) => {
            let (ni, v) = rows_of(m, &format!("{field}.matrix_imag"))?;
            if ni != n {
                return Err(field_err(
                    format!("{field}.matrix_imag"),
                    format!("is {ni}x{ni} but matrix_real is {n}x{n}"),
                ));
            }
            v
        }
        None => vec![0.0; n * n],
    };
    let entries: Vec<Complex64> = re_vals
        .iter()
        .zip(&im_vals)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    if entries
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(field_err(field, "matrix entries must be finite"));
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

impl GraphSpec {
    pub fn to_graph(&self) -> Result<MetricGraph, SpecError> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let potential = match &e.potential {
                    PotentialSpec::Zero => Potential::Zero,
                    PotentialSpec::Constant { value } => Potential::Constant(*value),
                    PotentialSpec::Polynomial { coeffs } => Potential::Polynomial(coeffs.clone()),
                    PotentialSpec::Table { xs, qs } => Potential::Table {
                        xs: xs.clone(),
                        qs: qs.clone(),
                    },
                };
                Edge::new(e.length, potential)
            })
            .collect();
        let coupling = match &self.coupling {
            CouplingFile::Hermitian {
                matrix_real,
                matrix_imag,
            } => CouplingSpec::Hermitian(complex_matrix(
                matrix_real,
                matrix_imag.as_ref(),
                "coupling",
            )?),
            CouplingFile::Unitary {
                matrix_real,
                matrix_imag,
            } => CouplingSpec::Unitary(complex_matrix(
                matrix_real,
                matrix_imag.as_ref(),
                "coupling",
            )?),
            CouplingFile::Vertices { vertices } => {
                let mut out = Vec::with_capacity(vertices.len());
                for (v, vf) in vertices.iter().enumerate() {
                    let field = format!("coupling.vertices[{v}]");
                    if let Some(bad) = vf.endpoints.iter().position(|&e| e == 0) {
                        return Err(field_err(
                            format!("{field}.endpoints[{bad}]"),
                            "endpoints are numbered from 1",
                        ));
                    }
                    out.push(VertexCoupling {
                        matrix: complex_matrix(&vf.matrix_real, vf.matrix_imag.as_ref(), &field)?,
                        endpoints: vf.endpoints.iter().map(|e| e - 1).collect(),
                    });
                }
                CouplingSpec::Vertices(out)
            }
        };
        Ok(MetricGraph::new(edges, coupling))
    }

    pub fn from_graph(g: &MetricGraph) -> Self {
        let split = |m: &CMatrix| -> (MatrixData, Option<MatrixData>) {
            let rows = |f: fn(&Complex64) -> f64| {
                MatrixData::Nested(
                    (0..m.nrows())
                        .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                        .collect(),
                )
            };
            (rows(|z| z.re), Some(rows(|z| z.im)))
        };
        let edges = g
            .edges
            .iter()
            .map(|e| EdgeSpec {
                length: e.length,
                potential: match &e.potential {
                    Potential::Zero => PotentialSpec::Zero,
                    Potential::Constant(c) => PotentialSpec::Constant { value: *c },
                    Potential::Polynomial(c) => PotentialSpec::Polynomial { coeffs: c.clone() },
                    Potential::Table { xs, qs } => PotentialSpec::Table {
                        xs: xs.clone(),
                        qs: qs.clone(),
                    },
                },
            })
            .collect();
        let coupling = match &g.coupling {
            CouplingSpec::Hermitian(m) => {
                let (matrix_real, matrix_imag) = split(m);
                CouplingFile::Hermitian {
                    matrix_real,
                    matrix_imag,
                }
            }
            CouplingSpec::Unitary(m) => {
                let (matrix_real, matrix_imag) = split(m);
                CouplingFile::Unitary {
                    matrix_real,
                    matrix_imag,
                }
            }
            CouplingSpec::Vertices(vs) => CouplingFile::Vertices {
                vertices: vs
                    .iter()
                    .map(|v| {
                        let (matrix_real, matrix_imag) = split(&v.matrix);
                        VertexFile {
                            endpoints: v.endpoints.iter().map(|e| e + 1).collect(),
                            matrix_real,
                            matrix_imag,
                        }
                    })
                    .collect(),
            },
        };
        GraphSpec { edges, coupling }
    }
}

/// Parses and validates a graph-spec document.
pub fn parse_graph_spec(text: &str) -> Result<MetricGraph, SpecError> {
    let spec: GraphSpec = serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let graph = spec.to_graph()?;
    let diagnostics = validate_graph(&graph);
    if diagnostics.is_empty() {
        Ok(graph)
    } else {
        Err(SpecError::Invalid(diagnostics))
    }
}

/// Fixed report formatting: 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn graph_to_json(g: &MetricGraph) -> String {
    serde_json::to_string_pretty(&GraphSpec::from_graph(g)).expect("graph spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_polynomial_interval() {
        let text = r#"{
            "edges": [{"length": 3.0, "potential": {"type": "polynomial", "coeffs": [0, 0, 1]}}],
            "coupling": {"type": "unitary", "matrix_real": [[1, 0], [0, 1]]}
        }"#;
        let g = parse_graph_spec(text).unwrap();
        assert_eq!(
            g.edges[0].potential,
            Potential::Polynomial(vec![0.0, 0.0, 1.0])
        );
        assert_eq!(g.coupling, CouplingSpec::Unitary(CMatrix::identity(2, 2)));
    }

    #[test]
    fn vertices_are_one_based_and_flat_matrices_accepted() {
        let text = r#"{
            "edges": [{"length": 1.0}, {"length": 2.0}],
            "coupling": {"type": "vertices", "vertices": [
                {"endpoints": [1, 3], "matrix_real": [1, 0, 0, 1]},
                {"endpoints": [2, 4], "matrix_real": [[1, 0], [0, 1]], "matrix_imag": [[0, 0], [0, 0]]}
            ]}
        }"#;
        let g = parse_graph_spec(text).unwrap();
        match &g.coupling {
            CouplingSpec::Vertices(vs) => assert_eq!(vs[0].endpoints, vec![0, 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_offending_field() {
        let err = parse_graph_spec(
            r#"{"edges": [{"lenght": 1.0}], "coupling": {"type": "unitary", "matrix_real": [1]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("lenght"), "{err}");

        let err = parse_graph_spec(
            r#"{"edges": [{"length": 1.0}], "coupling": {"type": "unitary", "matrix_real": [[1, 0], [0]]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("coupling.matrix_real[1]"), "{err}");

        let err = parse_graph_spec(r#"{"edges": [{"length": -1.0}], "coupling": {"type": "unitary", "matrix_real": [[1, 0], [0, 1]]}}"#)
            .unwrap_err();
        assert!(
            err.to_string().contains("NonPositiveLength(edge 1)"),
            "{err}"
        );
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "edges": [{"length": 1.5, "potential": {"type": "table", "xs": [0, 1.5], "qs": [2, -1]}}],
            "coupling": {"type": "hermitian", "matrix_real": [[1, 0.5], [0.5, 2]], "matrix_imag": [[0, 0.25], [-0.25, 0]]}
        }"#;
        let g = parse_graph_spec(text).unwrap();
        assert_eq!(parse_graph_spec(&graph_to_json(&g)).unwrap(), g);
    }
}
