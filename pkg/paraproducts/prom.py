from prometheus_client import CollectorRegistry

REGISTRY = CollectorRegistry()
