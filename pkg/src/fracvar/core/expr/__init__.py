"""Expression language for user-supplied Lagrangians."""

from .exprlang import EvalEnv, ExprNode, eval_expr, parse_expr, partial, to_source

__all__ = ["EvalEnv", "ExprNode", "eval_expr", "parse_expr", "partial", "to_source"]
