//! Tile diagrams: each product state covers the cells `A-support × B-support`
//! of an `n × m` grid, rows indexed by Alice's basis and columns by Bob's.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::states::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tile {
    /// 1-based position among the drawn tiles, in construction order.
    pub number: usize,
    pub label: String,
    /// Ket expression, e.g. `|3−5⟩_A|2⟩_B`.
    pub expression: String,
    /// `(row, col)` pairs, both 1-based.
    pub cells: BTreeSet<(usize, usize)>,
    pub contiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagram {
    pub n: usize,
    pub m: usize,
    pub tiles: Vec<Tile>,
    pub stopper_omitted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
}

fn is_interval(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[1] == w[0] + 1)
}

/// One tile per state, skipping any state whose supports cover both spaces.
pub fn layout(s: &StateSet) -> Diagram {
    let mut tiles = Vec::new();
    let mut stopper_omitted = false;
    for st in s.states() {
        if st.a.is_full_support() && st.b.is_full_support() {
            stopper_omitted = true;
            continue;
        }
        let (rows, cols) = (st.a.support(), st.b.support());
        let cells = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .collect();
        tiles.push(Tile {
            number: tiles.len() + 1,
            label: st.label.clone(),
            expression: format!("{}_A{}_B", st.a, st.b),
            cells,
            contiguous: is_interval(&rows) && is_interval(&cols),
        });
    }
    Diagram {
        n: s.n(),
        m: s.m(),
        tiles,
        stopper_omitted,
    }
}

impl Diagram {
    /// Tile numbers covering each cell, indexed `[row-1][col-1]`.
    fn occupancy(&self) -> Vec<Vec<Vec<usize>>> {
        let mut grid = vec![vec![Vec::new(); self.m]; self.n];
        for t in &self.tiles {
            for &(r, c) in &t.cells {
                grid[r - 1][c - 1].push(t.number);
            }
        }
        grid
    }

    /// Pairs of tile labels sharing at least one cell.
    pub fn overlapping_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, a) in self.tiles.iter().enumerate() {
            for b in &self.tiles[i + 1..] {
                if !a.cells.is_disjoint(&b.cells) {
                    out.push((a.label.clone(), b.label.clone()));
                }
            }
        }
        out
    }

    pub fn tiles_disjoint(&self) -> bool {
        self.overlapping_pairs().is_empty()
    }

    pub fn tile(&self, label: &str) -> Option<&Tile> {
        self.tiles.iter().find(|t| t.label == label)
    }
}

pub fn render(d: &Diagram, format: Format) -> String {
    match format {
        Format::Ascii => render_ascii(d),
        Format::Svg => render_svg(d),
    }
}

fn legend_line(t: &Tile) -> String {
    let split = if t.contiguous { "" } else { " (split)" };
    format!("{:>3}  {} = {}{split}", t.number, t.label, t.expression)
}

fn render_ascii(d: &Diagram) -> String {
    let grid = d.occupancy();
    let width = d.tiles.len().to_string().len().max(d.m.to_string().len()) + 2;
    let label_w = d.n.to_string().len() + 1;
    let mut out = String::new();

    let _ = write!(out, "{:label_w$}", "");
    for c in 1..=d.m {
        let _ = write!(out, " {c:^width$}");
    }
    out.push('\n');
    let rule = {
        let mut r = format!("{:label_w$}+", "");
        for _ in 0..d.m {
            r.push_str(&"-".repeat(width));
            r.push('+');
        }
        r.push('\n');
        r
    };
    out.push_str(&rule);
    for (r, row) in grid.iter().enumerate() {
        let _ = write!(out, "{:>w$}|", r + 1, w = label_w);
        for cell in row {
            let text = match cell.as_slice() {
                [] => ".".to_string(),
                [t] => t.to_string(),
                _ => "#".to_string(),
            };
            let _ = write!(out, "{text:^width$}|");
        }
        out.push('\n');
        out.push_str(&rule);
    }
    if d.stopper_omitted {
        out.push_str("stopper state omitted\n");
    }
    for t in &d.tiles {
        out.push_str(&legend_line(t));
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render_svg(d: &Diagram) -> String {
    const CELL: usize = 40;
    const MARGIN: usize = 40;
    const LINE: usize = 18;
    let grid = d.occupancy();
    let grid_w = d.m * CELL;
    let grid_h = d.n * CELL;
    let legend_rows = d.tiles.len() + usize::from(d.stopper_omitted);
    let width = (MARGIN * 2 + grid_w).max(360);
    let height = MARGIN * 2 + grid_h + LINE * legend_rows + LINE;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse">"#,
        r#"<path d="M0,6 L6,0" stroke="black" stroke-width="1"/></pattern></defs>"#,
        "\n"
    ));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="14" text-anchor="middle">B</text>"#,
        MARGIN + grid_w / 2
    );
    let _ = writeln!(
        s,
        r#"<text x="10" y="{}" text-anchor="middle">A</text>"#,
        MARGIN + grid_h / 2
    );
    for c in 1..=d.m {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{c}</text>"#,
            MARGIN + (c - 1) * CELL + CELL / 2,
            MARGIN - 8
        );
    }
    for r in 1..=d.n {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{r}</text>"#,
            MARGIN - 8,
            MARGIN + (r - 1) * CELL + CELL / 2 + 4
        );
    }
    for (r, row) in grid.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let (x, y) = (MARGIN + c * CELL, MARGIN + r * CELL);
            let fill = match cell.as_slice() {
                [] => "#ffffff".to_string(),
                [t] => PALETTE[(t - 1) % PALETTE.len()].to_string(),
                _ => "url(#hatch)".to_string(),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="black" stroke-width="1"/>"#
            );
            if let [t] = cell.as_slice() {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="middle">{t}</text>"#,
                    x + CELL / 2,
                    y + CELL / 2 + 4
                );
            }
        }
    }
    let mut y = MARGIN + grid_h + LINE + 4;
    if d.stopper_omitted {
        let _ = writeln!(s, r#"<text x="10" y="{y}">stopper state omitted</text>"#);
        y += LINE;
    }
    for t in &d.tiles {
        let _ = writeln!(
            s,
            r#"<text x="10" y="{y}" xml:space="preserve">{}</text>"#,
            xml_escape(legend_line(t).trim_start())
        );
        y += LINE;
    }
    s.push_str("</svg>\n");
    s
}
