import sklearn.metrics as m

score = m.r2_score(a, b)
