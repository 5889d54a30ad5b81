class DiscretizationInterface:
    def nodes(self, order: int):
        """
        Collocation nodes on [-1, 1].

        :param order: Number of nodes.
        :return: numpy array of shape (order,), ascending.
        """
        raise NotImplementedError("This method should be implemented by subclasses.")

    def basis(self, order: int, points):
        """
        Lagrange basis of the order-point scheme evaluated at `points` in [-1, 1].

        :param order: Number of nodes.
        :param points: numpy array of shape (m,).
        :return: numpy array of shape (m, order); row a holds l_b(points[a]) for every b.
        """
        raise NotImplementedError("This method should be implemented by subclasses.")
