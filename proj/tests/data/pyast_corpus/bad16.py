x = $
