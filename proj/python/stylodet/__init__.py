"""Python bindings for the stylodet detector."""

import json as _json

from ._core import (  # noqa: F401
    GRAMMAR_ID,
    ArtifactMismatch,
    Bundle,
    Error,
    InputError,
    Model,
    bin_index,
    count_statement_tokens,
    dump_tree,
    fisher_combine,
    has_parse_errors,
    lexical_features,
    metrics,
    nested_bigrams,
    percentile,
    rank_auc,
    run_cli,
    split_into_groups,
    train,
    welch_t_test,
)
from ._core import ingest as _ingest


def ingest(root):
    """Return the corpus manifest for ``root`` as a dict."""
    return _json.loads(_ingest(str(root)))


def main(argv=None):
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
