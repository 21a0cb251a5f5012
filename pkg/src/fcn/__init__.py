"""fcn: a food claim-traceability pipeline and knowledge graph.

Turns raw food-discourse text into schema-conformant, provenance-linked
claim records inside a queryable embedded triple store, with stance-tagged
evidence, a human review loop, and evaluation tooling.
"""

__version__ = "0.1.0"
