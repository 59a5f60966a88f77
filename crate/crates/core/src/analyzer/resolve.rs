use crate::graph::CodeGraph;
use crate::model::{simple_class_name, ImportDecl, InvocationRef};

/// The file-level facts resolution needs.
#[derive(Debug, Clone, Copy)]
pub struct ResolveContext<'a> {
    pub imports: &'a [ImportDecl],
    pub containing_class: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Resolved { invocation: InvocationRef, tier: u8 },
    Unresolved(InvocationRef),
    /// Two or more candidates at the same tier; left unresolved.
    Ambiguous {
        invocation: InvocationRef,
        candidates: Vec<String>,
    },
}

impl Resolution {
    pub fn into_invocation(self) -> InvocationRef {
        match self {
            Resolution::Resolved { invocation, .. }
            | Resolution::Unresolved(invocation)
            | Resolution::Ambiguous { invocation, .. } => invocation,
        }
    }
}

/// Classes known to the graph that the imports bring into scope, in import
/// order without duplicates. Wildcards expand to all graph classes directly
/// under the named package or class, sorted by name; a static member import
/// contributes its declaring class.
pub fn imported_classes(imports: &[ImportDecl], graph: &CodeGraph) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let push = |fqn: &str, out: &mut Vec<String>| {
        if !out.iter().any(|c| c == fqn) {
            out.push(fqn.to_string());
        }
    };
    for imp in imports {
        let qn = imp.qualified_name.as_str();
        match (imp.is_static, imp.is_wildcard) {
            (false, false) => {
                if graph.class(qn).is_some() {
                    push(qn, &mut out);
                }
            }
            (false, true) => {
                for c in graph.classes_under(qn) {
                    push(c, &mut out);
                }
            }
            (true, true) => {
                if graph.class(qn).is_some() {
                    push(qn, &mut out);
                }
            }
            (true, false) => {
                if graph.class(qn).is_some() {
                    push(qn, &mut out);
                } else if let Some((owner, _)) = qn.rsplit_once('.') {
                    if graph.class(owner).is_some() {
                        push(owner, &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Best-effort resolution of a call site to `Class#method`.
///
/// Tiers, first hit wins:
/// 1. an unqualified or `this.` call to a method of the containing class;
/// 2. a receiver naming an imported class that declares the method;
/// 3. a unique public method of that name among all imported classes.
///
/// Two or more distinct classes at one tier is an ambiguity and stops
/// resolution.
pub fn resolve_invocation(inv: &InvocationRef, ctx: ResolveContext<'_>, graph: &CodeGraph) -> Resolution {
    let name = inv.simple_name.as_str();
    let done = |class: &str, tier: u8| {
        let mut invocation = inv.clone();
        invocation.resolved_fqn = Some(format!("{class}#{name}"));
        Resolution::Resolved { invocation, tier }
    };
    let declares = |class: &str, public_only: bool| {
        graph
            .class_methods(class)
            .iter()
            .any(|m| m.name == name && (!public_only || m.is_public()))
    };

    let local_receiver = matches!(inv.receiver.as_deref(), None | Some("this"));
    if local_receiver && declares(ctx.containing_class, false) {
        return done(ctx.containing_class, 1);
    }

    let imported = imported_classes(ctx.imports, graph);

    if let Some(recv) = inv.receiver.as_deref() {
        let hits: Vec<&String> = imported
            .iter()
            .filter(|c| (simple_class_name(c) == recv || c.as_str() == recv) && declares(c, true))
            .collect();
        match hits.len() {
            0 => {}
            1 => return done(hits[0], 2),
            _ => return ambiguous(inv, hits),
        }
    }

    let hits: Vec<&String> = imported.iter().filter(|c| declares(c, true)).collect();
    match hits.len() {
        0 => Resolution::Unresolved(inv.clone()),
        1 => done(hits[0], 3),
        _ => ambiguous(inv, hits),
    }
}

fn ambiguous(inv: &InvocationRef, hits: Vec<&String>) -> Resolution {
    Resolution::Ambiguous {
        invocation: inv.clone(),
        candidates: hits
            .into_iter()
            .map(|c| format!("{c}#{}", inv.simple_name))
            .collect(),
    }
}
