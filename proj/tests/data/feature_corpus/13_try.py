def load(path):
    try:
        with open(path) as fh:
            data = fh.read()
    except OSError:
        data = ''
    except (ValueError, KeyError) as e:
        raise RuntimeError(e)
    else:
        pass
    finally:
        print('done')
    return data
