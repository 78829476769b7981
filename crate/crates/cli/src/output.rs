//! CSV rendering. One fixed dialect: comma separator, `.` decimal point,
//! LF line endings, floats at 13 significant digits so round-tripping
//! through text loses nothing measurable.

use std::fmt::Write;

pub enum Cell {
    F(f64),
    I(u64),
    S(String),
}

/// Renders a table with the versioned header comment on the first line.
pub fn render_csv(subcommand: &str, columns: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# combtime csv v1 {subcommand}");
    let _ = writeln!(out, "{}", columns.join(","));
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::F(x) => {
                    let _ = write!(out, "{x:.12e}");
                }
                Cell::I(n) => {
                    let _ = write!(out, "{n}");
                }
                Cell::S(s) => out.push_str(s),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_names_and_digits() {
        let csv = render_csv(
            "sql",
            &["a", "b", "c"],
            &[vec![
                Cell::F(9.158066894828987e-23),
                Cell::I(42),
                Cell::S("coherent".to_string()),
            ]],
        );
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# combtime csv v1 sql"));
        assert_eq!(lines.next(), Some("a,b,c"));
        assert_eq!(lines.next(), Some("9.158066894829e-23,42,coherent"));
        assert_eq!(lines.next(), None);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn floats_round_trip_through_text() {
        for &x in &[1.0, -2.805e-23, 6.558e-16, 1.2345678901234e8] {
            let csv = render_csv("t", &["x"], &[vec![Cell::F(x)]]);
            let text = csv.lines().last().unwrap();
            let back: f64 = text.parse().unwrap();
            assert!((back - x).abs() <= x.abs() * 1e-12);
        }
    }
}
