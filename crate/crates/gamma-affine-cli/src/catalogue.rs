//! Named bundled presentations that configs can reference with `use = ...`.

use gamma_affine_core::conformal::{self, ConformalPresentation};
use gamma_affine_core::examples;
use gamma_affine_core::lie::Presentation;

/// One catalogue entry: the name a config uses, integer arguments it takes,
/// a one-line description, and the default degree window for its checks.
pub struct CatalogueEntry {
    pub name: &'static str,
    pub args: &'static str,
    pub description: &'static str,
    pub default_window: i64,
}

pub fn entries() -> Vec<CatalogueEntry> {
    vec![
        CatalogueEntry {
            name: "sl2_chevalley",
            args: "",
            description: "sl2 with the order-two Chevalley involution, character -1",
            default_window: 4,
        },
        CatalogueEntry {
            name: "sl2_corrupted",
            args: "",
            description: "sl2 with [e,f] = h + e; negative control that breaks Jacobi",
            default_window: 3,
        },
        CatalogueEntry {
            name: "sl3_diagonal",
            args: "",
            description: "sl3 twisted by diag(1, z3, z3^2) with character value z3",
            default_window: 3,
        },
        CatalogueEntry {
            name: "heisenberg1",
            args: "",
            description: "rank-1 Heisenberg data with the order-two sign symmetry",
            default_window: 4,
        },
        CatalogueEntry {
            name: "heisenberg_untwisted",
            args: "",
            description: "rank-1 Heisenberg data with trivial symmetry group",
            default_window: 4,
        },
        CatalogueEntry {
            name: "gl_torus",
            args: "band check",
            description: "gl over Z acted on by shifts, with formal unit q1",
            default_window: 3,
        },
        CatalogueEntry {
            name: "gl_half_turn",
            args: "band check",
            description: "gl over Z with the order-two character sending the shift to -1",
            default_window: 3,
        },
        CatalogueEntry {
            name: "gl_zk",
            args: "band check",
            description: "gl over Z^2 with two independent formal units q1, q2",
            default_window: 2,
        },
        CatalogueEntry {
            name: "sl4_shift",
            args: "",
            description: "block-diagonal sl4 copies indexed by Z, shifted by the group",
            default_window: 2,
        },
        CatalogueEntry {
            name: "gn_permutation",
            args: "n",
            description: "n commuting Heisenberg copies cyclically permuted by Z/n",
            default_window: 3,
        },
        CatalogueEntry {
            name: "virasoro",
            args: "",
            description: "Virasoro conformal data with formal central charge q1",
            default_window: 3,
        },
    ]
}

pub enum Resolved {
    Lie(Presentation),
    Conformal(ConformalPresentation),
}

/// Look a name up, with its integer arguments.
pub fn resolve(name: &str, args: &[i64]) -> Result<Resolved, String> {
    let need = |n: usize| -> Result<(), String> {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("`{}` takes {} integer argument(s), got {}", name, n, args.len()))
        }
    };
    match name {
        "sl2_chevalley" => {
            need(0)?;
            Ok(Resolved::Lie(examples::sl2_chevalley()))
        }
        "sl2_corrupted" => {
            need(0)?;
            Ok(Resolved::Lie(examples::sl2_corrupted()))
        }
        "sl3_diagonal" => {
            need(0)?;
            Ok(Resolved::Lie(examples::sl3_diagonal()))
        }
        "heisenberg1" => {
            need(0)?;
            Ok(Resolved::Lie(examples::heisenberg1()))
        }
        "heisenberg_untwisted" => {
            need(0)?;
            Ok(Resolved::Lie(examples::heisenberg_untwisted()))
        }
        "gl_torus" => {
            need(2)?;
            Ok(Resolved::Lie(examples::gl_torus(args[0], args[1])))
        }
        "gl_half_turn" => {
            need(2)?;
            Ok(Resolved::Lie(examples::gl_half_turn(args[0], args[1])))
        }
        "gl_zk" => {
            need(2)?;
            Ok(Resolved::Lie(examples::gl_zk(args[0], args[1])))
        }
        "sl4_shift" => {
            need(0)?;
            Ok(Resolved::Lie(examples::sl4_shift()))
        }
        "gn_permutation" => {
            need(1)?;
            if args[0] < 2 {
                return Err("gn_permutation needs n >= 2".into());
            }
            Ok(Resolved::Lie(examples::gn_permutation(args[0] as u64)))
        }
        "virasoro" => {
            need(0)?;
            Ok(Resolved::Conformal(conformal::virasoro()))
        }
        other => Err(format!("unknown presentation `{}`", other)),
    }
}
