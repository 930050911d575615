# Grid Lab tasks
# One module per command, each exposing run(params, file_bytes=None) -> (payload, status)
