# Grid Lab shared utilities
# Response payloads, settings access and the error hierarchy
