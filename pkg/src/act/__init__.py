"""act: streaming social-media analytics for emergency operations.

The pipeline turns a microblog stream into operator-facing analytics:
raw posts are tracked and filtered, noise is dropped, kept posts are
clustered into events, events are enriched with location, category,
sentiment and media, and everything is served over an HTTP API.
"""

__version__ = "0.1.0"
