"""
"""
from rknl_machine.core.term import (App, ContextFrame, Ident, Lam, Namespace, Step, Term, Var,
                                    alpha_eq, free_vars, node_count, size, term_eq)
from rknl_machine.core.syntax import parse, print_term
from rknl_machine.core.oracle import (find_redex, is_neutral, is_normal, no_normalize, no_step,
                                      subst)

__all__ = ['App',
           'ContextFrame',
           'Ident',
           'Lam',
           'Namespace',
           'Step',
           'Term',
           'Var',
           'alpha_eq',
           'free_vars',
           'node_count',
           'size',
           'term_eq',
           'parse',
           'print_term',
           'find_redex',
           'is_neutral',
           'is_normal',
           'no_normalize',
           'no_step',
           'subst']
